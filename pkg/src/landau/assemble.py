"""Steps 5 and 6: normalized-prefix candidates, their mutual elimination by
sandwich bounds, exact suffix evaluation, and the final maximum g(n).

Each plain prefix delta from D(B) is normalized by appending the primes just
above p_k (or peeling the top of N) so that what remains of g(n) is a
balanced fraction counted by G(p_{k+w}, n - l(N*Pi)).  The cumulative prime
sums pin w to at most a couple of values per delta; cheap two-sided bounds
on G then eliminate most candidates before the expensive exact evaluation.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from mpmath import mp, mpf

from .arith import PrimeFraction, log_int
from .benefit import BenefitTables, BoundResult, bound_loop
from .errors import (
    BoundFailureError,
    CapacityError,
    InvariantViolation,
    PrefixGapError,
)
from .gfunction import GEngine
from .oracle import g_list_merge_prune
from .primes import PrimeTable, auto_limit
from .superchampion import SuperchampionContext, build_e2_table, find_context

# the benefit method is known to fail for a handful of n below this; the
# baseline oracle is authoritative (and cheap) there
ORACLE_FALLBACK_MAX_N = 2485


@dataclass
class NormalizedCandidate:
    plain: object                 # the PrefixCandidate it came from
    omega: int
    Pi: PrimeFraction
    dell_Pi: int                  # l(N*Pi) - l(N)
    ben_Pi: mpf
    m_suffix: int                 # n - l(N*Pi)
    base_idx: int                 # prime-table index of p_{k+omega}
    base_prime: int
    next_prime: int               # p_{k+omega+1}

    def lower_log(self, table):
        q = table.next_prime(self.next_prime - self.m_suffix - 1)
        if q <= self.base_prime:
            return self.Pi.log + log_int(self.next_prime) - log_int(q)
        return self.Pi.log

    def upper_log(self):
        return self.Pi.log + log_int(self.next_prime) - mp.log(self.next_prime - self.m_suffix)

    def upper_rational(self):
        return (
            self.Pi.numerator() * self.next_prime,
            self.Pi.denominator() * (self.next_prime - self.m_suffix),
        )


def normalized_candidates(ctx, bound, d_set, n, tables=None):
    """All (delta, omega) pairs whose walk sum lands in the admissible window
    and whose continuation prime stays at or above t1."""
    tables = tables or BenefitTables(ctx)
    t = ctx.table
    cs = t.cumulative
    k = ctx.k
    s_k = int(cs[k - 1])
    rho = ctx.rho.value
    denom = 1 - rho / bound.t1
    if denom <= 0:
        raise InvariantViolation("t1 at or below rho")
    width = bound.B / denom
    out = []
    for cand in d_set:
        hi = n - ctx.ellN - cand.dell
        weak_lo = hi - width
        # omega >= 0: S_w = p_{k+1} + ... + p_{k+w}
        if hi >= 0:
            w_max = int(np.searchsorted(cs, hi + s_k, side="right")) - k
            if k + w_max > len(t):
                raise CapacityError("champion walk beyond prime table")
            w = w_max
            while w >= 0:
                s_w = int(cs[k + w - 1]) - s_k if w > 0 else 0
                if mpf(s_w) < weak_lo:
                    break
                _try_candidate(ctx, bound, tables, out, cand, w, s_w, hi, denom)
                w -= 1
        # omega < 0: peel p_k, p_{k-1}, ... while the peeled prime stays >= t1
        count = 1
        while True:
            peeled = t.prime(k - count + 1)
            if mpf(peeled) < bound.t1:
                break
            s_w = int(cs[k - count - 1]) - s_k  # negative
            if mpf(s_w) < weak_lo:
                break
            if s_w <= hi:
                _try_candidate(ctx, bound, tables, out, cand, -count, s_w, hi, denom)
            count += 1
    if not out:
        raise InvariantViolation(
            "no normalized candidate at n=%d; the true prefix must qualify" % n
        )
    return out


def _try_candidate(ctx, bound, tables, out, cand, w, s_w, hi, denom):
    t = ctx.table
    ben_pi = cand.ben + (tables.up_ben(w) if w >= 0 else tables.down_ben(-w))
    # sharpened window: S_w >= hi - (B - ben(N*Pi)) / (1 - rho/t1)
    if mpf(s_w) < hi - (bound.B - ben_pi) / denom:
        return
    m_suffix = hi - s_w
    next_p = t.prime(ctx.k + w + 1)
    if mpf(next_p) < bound.t1:
        return
    if mpf(next_p - m_suffix) < ctx.sqrt_x1:
        raise PrefixGapError(
            "candidate at omega=%d has p_{k+w+1}-m = %d below sqrt(x1)=%s"
            % (w, next_p - m_suffix, mp.nstr(ctx.sqrt_x1, 10))
        )
    if w >= 0:
        walk = {t.prime(ctx.k + i): 1 for i in range(1, w + 1)}
    else:
        walk = {t.prime(ctx.k - i): -1 for i in range(-w)}
    pi = cand.delta.mul(PrimeFraction.from_factors(walk))
    out.append(
        NormalizedCandidate(
            plain=cand,
            omega=w,
            Pi=pi,
            dell_Pi=cand.dell + s_w,
            ben_Pi=ben_pi,
            m_suffix=m_suffix,
            base_idx=ctx.k + w,
            base_prime=t.prime(ctx.k + w),
            next_prime=next_p,
        )
    )


def fight(cands, ctx):
    """Keep only candidates whose upper sandwich bound reaches the best lower
    bound; log comparison with an exact rational tiebreak."""
    if len(cands) <= 1:
        return list(cands)
    t = ctx.table
    lowers = [c.lower_log(t) for c in cands]
    best_i = max(range(len(cands)), key=lambda i: lowers[i])
    best_low = lowers[best_i]
    bc = cands[best_i]
    q_best = t.next_prime(bc.next_prime - bc.m_suffix - 1)
    if q_best <= bc.base_prime:
        best_low_num = bc.Pi.numerator() * bc.next_prime
        best_low_den = bc.Pi.denominator() * q_best
    else:
        best_low_num, best_low_den = bc.Pi.numerator(), bc.Pi.denominator()
    guard = mpf(10) ** (-mp.dps + 4)
    out = []
    for c, low in zip(cands, lowers):
        if c is bc:
            out.append(c)
            continue
        up = c.upper_log()
        if up - best_low > guard:
            out.append(c)
        elif best_low - up > guard:
            continue
        else:
            un, ud = c.upper_rational()
            if un * best_low_den >= best_low_num * ud:
                out.append(c)
    return out


@dataclass
class LandauResult:
    """g(n) as champion times correction, with exact cost and 30-digit log."""

    n: int
    correction: PrimeFraction
    ell_g: int
    champion: Optional[object] = None       # None when served by the oracle
    rho: Optional[object] = None
    context: Optional[SuperchampionContext] = None
    log10_g: mpf = None
    from_oracle: bool = False

    def log_g(self):
        base = self.champion.log if self.champion is not None else mpf(0)
        return base + self.correction.log

    def max_prime_factor(self):
        best = self.correction.max_prime() if self.correction.factors else 1
        if self.champion is not None:
            t = self.champion.table
            idx = self.champion.k
            while idx >= 1:
                p = t.prime(idx)
                if self.champion.alpha(p) + self.correction.exponent(p) > 0:
                    best = max(best, p)
                    break
                idx -= 1
        return best

    def to_int(self, digit_budget=10**7):
        digits = self.log_g() / log_int(10)
        if digits > digit_budget:
            raise CapacityError(
                "g(n) has ~%d digits, budget %d" % (int(digits) + 1, digit_budget)
            )
        num = self.correction.numerator()
        den = self.correction.denominator()
        if self.champion is not None:
            num *= self.champion.to_int(digit_budget + 100)
        if num % den:
            raise InvariantViolation("correction denominator does not divide N")
        return num // den

    def check_bounds(self):
        """The effective two-sided bounds on log g(n) and its largest prime."""
        n = self.n
        logg = self.log_g()
        if n >= 4:
            root = mp.sqrt(n * mp.log(n))
            if n >= 906 and not logg >= root:
                raise InvariantViolation("log g(n) below sqrt(n log n) at n=%d" % n)
            maj = root * (1 + (mp.log(mp.log(n)) - mpf("0.975")) / (2 * mp.log(n)))
            if not logg <= maj:
                raise InvariantViolation("log g(n) above its effective majorant at n=%d" % n)
        if n >= 5:
            if not self.max_prime_factor() <= mpf("1.328") * mp.sqrt(n * mp.log(n)):
                raise InvariantViolation("largest prime factor bound violated at n=%d" % n)


@dataclass
class ComputeDetails:
    ctx: SuperchampionContext
    bound: BoundResult
    d_set: list
    candidates: list
    survivors: list
    evaluated: int


class Solver:
    """Wires the prime table, event table, caches and the pipeline together.

    One Solver instance amortizes everything reusable across calls: contexts,
    their benefit tables and candidate sets, per-prime G tables, and the
    small-n oracle.
    """

    def __init__(self, limit_hint=None, cache_dir=None, sieve_limit=None,
                 max_sieve=None, digit_budget=10**7):
        self.cache_dir = cache_dir
        self.sieve_limit = sieve_limit
        self.max_sieve = max_sieve
        self.digit_budget = digit_budget
        self.table = None
        self.engine = None
        self._e2 = None
        self._e2_limit = 0
        self._ctx_cache = []
        self._oracle = None
        self._oracle_limit = -1
        if limit_hint is not None:
            self._ensure(limit_hint)

    # -- infrastructure -----------------------------------------------------

    def _ensure(self, n):
        limit = self.sieve_limit or auto_limit(n)
        if self.table is None or self.table.limit < limit:
            kw = {"cache_dir": self.cache_dir}
            if self.max_sieve:
                kw["max_limit"] = self.max_sieve
            self.table = PrimeTable.build(limit, **kw)
            self.engine = GEngine(self.table, cache_dir=self.cache_dir)
            self._ctx_cache = []
            self._e2 = None
            self._e2_limit = 0
        if n >= 7 and self._e2_limit < n:
            self._e2 = build_e2_table(max(n, 10**4), self.table, cache_dir=self.cache_dir)
            self._e2_limit = max(n, 10**4)

    def oracle_value(self, n):
        if self._oracle is None or self._oracle_limit < n:
            lim = max(n, ORACLE_FALLBACK_MAX_N)
            self._oracle = g_list_merge_prune(lim)
            self._oracle_limit = lim
        return self._oracle.query(n)

    def context(self, n):
        self._ensure(n)
        for ctx, tables, dcache in self._ctx_cache:
            if ctx.covers(n):
                return ctx, tables, dcache
        ctx = find_context(n, self.table, self._e2)
        tables = BenefitTables(ctx)
        dcache = {}
        self._ctx_cache.append((ctx, tables, dcache))
        if len(self._ctx_cache) > 8:
            self._ctx_cache.pop(0)
        return ctx, tables, dcache

    # -- the pipeline --------------------------------------------------------

    def compute(self, n, details=False):
        if n < 0:
            raise ValueError("n must be >= 0")
        if n < 7:
            res = self._from_oracle(n)
            return (res, None) if details else res
        try:
            return self._compute_fast(n, details)
        except (BoundFailureError, PrefixGapError):
            if n < ORACLE_FALLBACK_MAX_N:
                res = self._from_oracle(n)
                return (res, None) if details else res
            raise

    def _from_oracle(self, n):
        value = self.oracle_value(n)
        frac = PrimeFraction.from_int(value)
        res = LandauResult(
            n=n,
            correction=frac,
            ell_g=frac.ell,
            log10_g=frac.log / log_int(10),
            from_oracle=True,
        )
        res.check_bounds()
        return res

    def _compute_fast(self, n, details=False):
        ctx, tables, dcache = self.context(n)
        bound, d_set = bound_loop(ctx, n, tables, dset_cache=dcache)
        cands = normalized_candidates(ctx, bound, d_set, n, tables)
        survivors = fight(cands, ctx)
        order = sorted(survivors, key=lambda c: c.lower_log(ctx.table), reverse=True)
        best = None
        best_num = best_den = None
        best_cand = None
        best_cost = None
        evaluated = 0
        for cand in order:
            if best is not None:
                un, ud = cand.upper_rational()
                if un * best_den < best_num * ud:
                    continue
            frac = self.engine.g_fraction(cand.base_prime, cand.m_suffix)
            evaluated += 1
            ell_val = ctx.ellN + cand.dell_Pi + frac.cost
            if ell_val > n:
                raise InvariantViolation("evaluated candidate exceeds the cost budget")
            value = cand.Pi.mul(frac.as_fraction())
            if best is None or value.cmp(best) > 0:
                best = value
                best_num, best_den = value.rational()
                best_cand = cand
                best_cost = frac.cost
        if not best_cand.ben_Pi <= bound.B:
            raise InvariantViolation("winning candidate exceeds the benefit bound")
        res = LandauResult(
            n=n,
            correction=best,
            ell_g=ctx.ellN + best_cand.dell_Pi + best_cost,
            champion=ctx.N,
            rho=ctx.rho,
            context=ctx,
        )
        res.log10_g = res.log_g() / log_int(10)
        res.check_bounds()
        if details:
            return res, ComputeDetails(ctx, bound, d_set, cands, survivors, evaluated)
        return res


def compute_g(n, solver=None, **kwargs):
    """One-shot g(n); build a Solver yourself to amortize tables over calls."""
    solver = solver or Solver(limit_hint=n, **kwargs)
    return solver.compute(n)
