"""Exact computation of Landau's function g(n), the maximal order of a
permutation on n letters, in factored form for n up to 10^15."""

from .arith import PrimeFraction, parse_factored, render_factored, set_precision
from .assemble import LandauResult, Solver, compute_g
from .errors import (
    BoundFailureError,
    CapacityError,
    Delta1CeilingError,
    InvariantViolation,
    LandauError,
    PrefixGapError,
)
from .gfunction import GEngine, GFraction
from .oracle import g_bruteforce, g_list_merge_prune, g_table_dp
from .primes import PrimeTable
from .superchampion import build_e2_table, find_context

__version__ = "0.1.0"

__all__ = [
    "BoundFailureError",
    "CapacityError",
    "Delta1CeilingError",
    "GEngine",
    "GFraction",
    "InvariantViolation",
    "LandauError",
    "LandauResult",
    "PrefixGapError",
    "PrimeFraction",
    "PrimeTable",
    "Solver",
    "build_e2_table",
    "compute_g",
    "find_context",
    "g_bruteforce",
    "g_list_merge_prune",
    "g_table_dp",
    "parse_factored",
    "render_factored",
    "set_precision",
]
