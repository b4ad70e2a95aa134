"""Exceptions shared across the package."""


class LandauError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(LandauError):
    """A table, range or digit expansion exceeds its configured budget."""


class BoundFailureError(LandauError):
    """The benefit bound B reached or exceeded the structural threshold B1.

    Below B1 large primes of candidates are guaranteed to have exponent <= 1,
    which the whole prefix/suffix machinery relies on.  No instance is known
    for n >= 166; for smaller n the caller may fall back to a baseline oracle.
    """


class PrefixGapError(LandauError):
    """A normalized-prefix candidate violates p_{k+w+1} - m >= sqrt(x1).

    The inequality is unproven but no counterexample is known; we abort
    loudly instead of guessing a repair.
    """


class Delta1CeilingError(LandauError):
    """The search for delta1(p) exceeded its heuristic ceiling."""


class InvariantViolation(LandauError):
    """An internal consistency check failed; indicates a bug, not bad input."""
