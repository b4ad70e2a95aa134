"""Benefit arithmetic and plain-prefix candidate sets.

ben(M) = l(M) - l(N) - rho*log(M/N) >= 0 measures how far M sits above the
champion hull at slope rho; it is additive over coprime parts, so a
candidate's benefit accumulates prime by prime.  The candidate set D(B')
holds every fraction on primes < sqrt(x1) that could be the small-prime part
of g(n) while ben g(n) <= B'; dominated candidates (smaller value, no
cheaper cost) are pruned as in the champion-list oracle.
"""

from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .arith import PrimeFraction, ell_pp, log_int
from .errors import BoundFailureError, InvariantViolation


class PrefixCandidate:
    __slots__ = ("delta", "ben", "dell")

    def __init__(self, delta, ben, dell):
        self.delta = delta
        self.ben = ben    # ben(N*delta), high precision
        self.dell = dell  # l(N*delta) - l(N), exact

    def __repr__(self):
        return "PrefixCandidate(%r, ben=%s, dell=%d)" % (
            self.delta.render(), mp.nstr(self.ben, 8), self.dell)


def dell_pp(p, alpha, gamma):
    """l(p^(alpha+gamma)) - l(p^alpha)."""
    return ell_pp(p, alpha + gamma) - ell_pp(p, alpha)


class BenefitTables:
    """Per-context cache: small-prime benefits ben(N p^gamma) and the prefix
    sums of single-prime benefits along the walk above/below p_k."""

    def __init__(self, ctx):
        self.ctx = ctx
        t = ctx.table
        self.sp_count = t.count_upto(int(mp.floor(ctx.sqrt_x1)))
        self.sp_primes = [t.prime(i) for i in range(1, self.sp_count + 1)]
        self.alphas = {p: ctx.N.alpha(p) for p in self.sp_primes}
        self._benp = {}
        self._up = [mpf(0)]    # partial sums of ben(N p_{k+i}), i = 1..
        self._down = [mpf(0)]  # partial sums of ben(N / p_{k-i}), i = 0..

    def benp(self, p, gamma):
        """ben restricted to one prime p < sqrt(x1): change its exponent in N
        by gamma (>= -alpha_p)."""
        key = (p, gamma)
        v = self._benp.get(key)
        if v is None:
            alpha = self.alphas[p]
            if gamma < -alpha:
                raise ValueError("exponent of %d cannot drop below -%d" % (p, alpha))
            rho = self.ctx.rho
            if gamma == 0:
                v = mpf(0)
            elif gamma == 1 and rho.is_power_event and p == rho.q:
                v = mpf(0)  # the slope is exactly this prime's exponent bump
            else:
                v = dell_pp(p, alpha, gamma) - rho.value * gamma * log_int(p)
            self._benp[key] = v
        return v

    def up_ben(self, omega):
        """Sum of ben(N p_{k+i}) for i = 1..omega (primes appended above p_k)."""
        t, ctx = self.ctx.table, self.ctx
        while len(self._up) <= omega:
            i = len(self._up)
            p = t.prime(ctx.k + i)
            if i == 1 and not ctx.rho.is_power_event and p == ctx.rho.q:
                term = mpf(0)  # appending p_{k+1} is the zero-benefit champion step
            else:
                term = p - ctx.rho.value * log_int(p)
            self._up.append(self._up[-1] + term)
        return self._up[omega]

    def down_ben(self, count):
        """Sum of ben(N / p_{k-i}) for i = 0..count-1 (primes peeled off the top)."""
        t, ctx = self.ctx.table, self.ctx
        while len(self._down) <= count:
            i = len(self._down) - 1
            p = t.prime(ctx.k - i)
            self._down.append(self._down[-1] + ctx.rho.value * log_int(p) - p)
        return self._down[count]


def ben(delta, ctx, tables=None):
    """ben(N*delta) for a prefix fraction delta supported below sqrt(x1)."""
    tables = tables or BenefitTables(ctx)
    total = mpf(0)
    for p, e in delta.factors:
        if p not in tables.alphas:
            raise ValueError("%d is not a prefix prime (>= sqrt(x1))" % p)
        total += tables.benp(p, e)
    return total


def build_prefix_sets(ctx, b_prime, tables=None):
    """The candidate set D(B'): all undominated prefix fractions with benefit
    at most B', built one prime at a time with pruning at each step."""
    if b_prime >= ctx.B1:
        raise BoundFailureError(
            "prefix budget %s is not below B1=%s" % (mp.nstr(b_prime, 10), mp.nstr(ctx.B1, 10))
        )
    if b_prime < 0:
        raise ValueError("budget must be non-negative")
    tables = tables or BenefitTables(ctx)
    d_set = [PrefixCandidate(PrimeFraction.one(), mpf(0), 0)]
    for p in tables.sp_primes:
        alpha = tables.alphas[p]
        extended = []
        for cand in d_set:
            budget = b_prime - cand.ben
            extended.append(cand)
            for gamma in range(-1, -alpha - 1, -1):
                cost = tables.benp(p, gamma)
                if cost > budget:
                    break
                extended.append(_extend(cand, p, alpha, gamma, cost))
            gamma = 1
            while True:
                cost = tables.benp(p, gamma)
                if cost > budget:
                    break
                extended.append(_extend(cand, p, alpha, gamma, cost))
                gamma += 1
        extended.sort(key=lambda c: c.delta.log)
        d_set = _prune(extended)
    return d_set


def _extend(cand, p, alpha, gamma, cost):
    return PrefixCandidate(
        cand.delta.mul_prime_power(p, gamma),
        cand.ben + cost,
        cand.dell + dell_pp(p, alpha, gamma),
    )


def _prune(cands):
    # by the domination lemma, delta1 cannot be the prefix of g(n) when some
    # delta2 > delta1 has l(N delta2) <= l(N delta1)
    out = []
    for c in cands:
        while out and out[-1].dell >= c.dell:
            out.pop()
        out.append(c)
    return out


@dataclass
class BoundResult:
    B: mpf
    t1: mpf
    witness: PrimeFraction  # the correction M/N achieving the bound


def _solve_t1(ctx, B):
    """Root of rho*log t - t = B in (rho, x1]; the map is decreasing there."""
    rho, x1 = ctx.rho.value, ctx.x1
    lo, hi = rho, x1
    t = (lo + hi) / 2
    for _ in range(200):
        f = rho * mp.log(t) - t - B
        if f > 0:
            lo = t
        else:
            hi = t
        step = f / (rho / t - 1)
        nt = t - step
        if not (lo < nt < hi):
            nt = (lo + hi) / 2
        if abs(nt - t) < mpf(10) ** (-mp.dps + 3) * t:
            t = nt
            break
        t = nt
    return t


def estimate_B(ctx, d_set, n, tables=None):
    """Upper bound B >= ben g(n) + n - l(g(n)) from the best witness
    N*delta_omega with the candidates' primes extended along the champion walk."""
    if not d_set:
        raise InvariantViolation("empty candidate set")
    tables = tables or BenefitTables(ctx)
    t = ctx.table
    cs = t.cumulative
    k = ctx.k
    s_k = int(cs[k - 1])
    sqrt_x1_floor = int(mp.floor(ctx.sqrt_x1))
    min_keep_idx = t.count_upto(sqrt_x1_floor) + 1  # removals must stay >= sqrt(x1)
    best = None
    best_parts = None
    for cand in d_set:
        c = n - ctx.ellN - cand.dell
        if c >= 0:
            omega = int(np.searchsorted(cs, c + s_k, side="right")) - k
            if k + omega > len(t):
                raise InvariantViolation("champion walk ran past the prime table")
            s_omega = int(cs[k + omega - 1]) - s_k
            ben_walk = tables.up_ben(omega)
        else:
            # peel p_k, p_{k-1}, ... until the cost drops below n
            idx = int(np.searchsorted(cs, s_k + c, side="left"))  # first with CS >= s_k+c
            count = k - idx
            if k - count + 1 < min_keep_idx:
                continue  # would peel primes below sqrt(x1): forget this candidate
            omega = -count
            s_omega = int(cs[k - count - 1]) - s_k  # negative
            ben_walk = tables.down_ben(count)
        slack = n - (ctx.ellN + cand.dell + s_omega)
        value = cand.ben + ben_walk + slack
        if best is None or value < best:
            best = value
            best_parts = (cand, omega)
    if best is None:
        raise BoundFailureError("no candidate admits a witness with l <= n")
    if best >= ctx.B1:
        raise BoundFailureError(
            "benefit bound %s reached B1=%s" % (mp.nstr(best, 10), mp.nstr(ctx.B1, 10))
        )
    cand, omega = best_parts
    witness = _walk_fraction(ctx, cand.delta, omega)
    return BoundResult(B=best, t1=_solve_t1(ctx, best), witness=witness)


def _walk_fraction(ctx, delta, omega):
    t = ctx.table
    if omega >= 0:
        ext = {t.prime(ctx.k + i): 1 for i in range(1, omega + 1)}
    else:
        ext = {t.prime(ctx.k - i): -1 for i in range(-omega)}
    return delta.mul(PrimeFraction.from_factors(ext))


def initial_budget(ctx, n):
    """First guess B' < B1: generous for tiny n, rho-scaled beyond."""
    if n < 2485:
        return ctx.B1 * (1 - mpf(10) ** (-6))
    if n <= 10**10:
        return ctx.rho.value
    return ctx.rho.value / 2


def bound_loop(ctx, n, tables=None, initial=None, dset_cache=None):
    """Iterate D(B') -> B until B <= B', then trim D to benefit <= B.

    B is always a valid bound; a second round only enlarges the candidate
    pool, so the loop settles after at most one restart in practice.
    """
    tables = tables or BenefitTables(ctx)
    b_prime = initial if initial is not None else initial_budget(ctx, n)
    for _ in range(8):
        if b_prime >= ctx.B1:
            raise BoundFailureError(
                "budget %s reached B1=%s" % (mp.nstr(b_prime, 10), mp.nstr(ctx.B1, 10))
            )
        if dset_cache is not None and b_prime in dset_cache:
            d_set = dset_cache[b_prime]
        else:
            d_set = build_prefix_sets(ctx, b_prime, tables)
            if dset_cache is not None:
                dset_cache[b_prime] = d_set
        res = estimate_B(ctx, d_set, n, tables)
        if res.B <= b_prime:
            if res.B < b_prime:
                d_set = [c for c in d_set if c.ben <= res.B]
            return res, d_set
        b_prime = res.B
    raise InvariantViolation("benefit bound loop failed to settle")
