"""Superchampion numbers: the integers N minimizing l(N) - rho*log N.

For a slope rho the champion's factorization is governed by thresholds
x_1 > x_2 > ... where (x_j^j - x_j^{j-1}) / log x_j = rho: a prime p gets
exponent j exactly when x_{j+1} <= p < x_j.  Champions are enumerated
through the critical slopes where some prime's exponent bumps from j-1 to
j (j >= 2); between two such events consecutive champions differ by one
new prime of exponent 1.
"""

import heapq
import os
from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional

from mpmath import mp, mpf, sqrt as mp_sqrt

from .arith import log_int, log_product
from .errors import CapacityError, InvariantViolation

E2_CACHE_VERSION = "landau-e2-v1"


class Rho:
    """A critical slope, kept symbolically as (q, j) so that the threshold
    x_j = q stays exact: j = 1 means q/log q, j >= 2 means
    (q^j - q^{j-1}) / log q."""

    __slots__ = ("q", "j", "_value")

    def __init__(self, q, j):
        self.q = q
        self.j = j
        self._value = None

    @property
    def value(self):
        if self._value is None:
            if self.j == 1:
                self._value = mpf(self.q) / log_int(self.q)
            else:
                self._value = mpf(self.q**self.j - self.q ** (self.j - 1)) / log_int(self.q)
        return self._value

    @property
    def is_power_event(self):
        return self.j >= 2

    def __repr__(self):
        if self.j == 1:
            return "Rho(%d/log %d)" % (self.q, self.q)
        return "Rho((%d^%d-%d^%d)/log %d)" % (self.q, self.j, self.q, self.j - 1, self.q)


class Threshold:
    """One x_j: a 30-digit value plus, when the slope is the defining event
    for this j, the exact integer root."""

    __slots__ = ("value", "exact")

    def __init__(self, value, exact=None):
        self.value = value
        self.exact = exact

    def greater_than_int(self, p):
        """x_j > p with the exact root honoured."""
        if self.exact is not None:
            return self.exact > p
        return self.value > p


def _solve_x1(rho):
    """Root >= 5 of x / log x = rho."""
    import math

    r = float(rho.value)
    x = r * math.log(r)
    for _ in range(60):
        nx = x - (x - r * math.log(x)) / (1.0 - r / x)
        if abs(nx - x) < 1e-12 * x:
            x = nx
            break
        x = nx
    xv = mpf(x)
    rv = rho.value
    for _ in range(8):
        xv = xv - (xv - rv * mp.log(xv)) / (1 - rv / xv)
    return xv


def _solve_xj(rho, j, hi):
    """Root > 1 of (x^j - x^{j-1}) / log x = rho; the map is increasing."""
    rv = rho.value
    lo = mpf(1) + mpf(10) ** (-mp.dps)
    hi = mpf(hi)
    for _ in range(80):
        mid = (lo + hi) / 2
        if (mid**j - mid ** (j - 1)) / mp.log(mid) < rv:
            lo = mid
        else:
            hi = mid
    x = (lo + hi) / 2
    for _ in range(10):
        lx = mp.log(x)
        f = x**j - x ** (j - 1) - rv * lx
        df = j * x ** (j - 1) - (j - 1) * x ** (j - 2) - rv / x
        step = f / df
        nx = x - step
        if not (lo <= nx <= hi):
            break
        x = nx
        if abs(step) < mpf(10) ** (-mp.dps + 2) * x:
            break
    return x


def xj_thresholds(rho):
    """All thresholds x_1 > x_2 > ... > 2, highest precision, exact where the
    slope is the defining event."""
    if rho.value < mpf(5) / log_int(5) * (1 - mpf(10) ** (-25)):
        raise ValueError("slope below 5/log 5 is out of range")
    xs = []
    if rho.j == 1:
        xs.append(Threshold(mpf(rho.q), exact=rho.q))
    else:
        xs.append(Threshold(_solve_x1(rho)))
    j = 2
    while True:
        if rho.j == j:
            x = Threshold(mpf(rho.q), exact=rho.q)
        else:
            x = Threshold(_solve_xj(rho, j, xs[-1].value))
            resid = abs((x.value**j - x.value ** (j - 1)) / mp.log(x.value) - rho.value)
            if resid > mpf(10) ** (-20) * rho.value:
                raise InvariantViolation("threshold root residual too large at j=%d" % j)
        if not x.greater_than_int(2):
            break
        xs.append(x)
        j += 1
    return xs


class Champion:
    """A champion factorization, run-compressed: exponent j on the primes in
    [x_{j+1}, x_j).  The exponent-1 run can hold millions of primes, so the
    value is never expanded; cost and log come from prime-table range sums."""

    __slots__ = ("table", "xs", "runs", "ell", "k", "_log")

    def __init__(self, table, xs):
        self.table = table
        self.xs = xs
        runs = []
        ell = 0
        lo_idx = 1  # conceptual x_{J+1} <= 2: the range for the top exponent starts at 2
        for j in range(len(xs), 0, -1):
            hi = xs[j - 1]
            if hi.exact is not None:
                hi_idx = table.count_upto(hi.exact - 1)
            else:
                hi_idx = table.count_upto(int(mp.floor(hi.value)))
            if hi_idx >= lo_idx:
                runs.append((j, lo_idx, hi_idx))
                if j == 1:
                    ell += table.sum_prime_range(lo_idx, hi_idx)
                else:
                    ell += sum(table.prime(i) ** j for i in range(lo_idx, hi_idx + 1))
            lo_idx = hi_idx + 1
        if not runs or runs[-1][0] != 1:
            raise InvariantViolation("champion has no exponent-1 primes")
        self.runs = runs
        self.ell = ell
        self.k = runs[-1][2]
        self._log = None

    @property
    def p_k(self):
        return self.table.prime(self.k)

    def alpha(self, p):
        """Exponent of p in the champion (0 when p >= x_1)."""
        n = 0
        for x in self.xs:
            if x.greater_than_int(p):
                n += 1
            else:
                break
        return n

    @property
    def log(self):
        if self._log is None:
            total = mpf(0)
            for j, lo, hi in self.runs:
                seg = self.table.primes[lo - 1 : hi].tolist()
                total += j * log_product(seg)
            self._log = total
        return self._log

    def iter_factors(self):
        for j, lo, hi in self.runs:
            for i in range(lo, hi + 1):
                yield self.table.prime(i), j

    def num_prime_factors(self):
        return sum(hi - lo + 1 for _, lo, hi in self.runs)

    def to_fraction(self):
        from .arith import PrimeFraction

        if self.num_prime_factors() > 200_000:
            raise CapacityError("champion too large to expand per-prime")
        return PrimeFraction(tuple((p, j) for p, j in self.iter_factors()))

    def to_int(self, digit_budget=10**7):
        digits = self.log / log_int(10)
        if digits > digit_budget:
            raise CapacityError(
                "champion has ~%d digits, budget %d" % (int(digits) + 1, digit_budget)
            )
        from .arith import _tree_product

        return _tree_product(p**j for p, j in self.iter_factors())

    def render(self):
        parts = []
        for j, lo, hi in self.runs:
            if lo == hi:
                base = str(self.table.prime(lo))
            else:
                base = "[%d-%d]" % (self.table.prime(lo), self.table.prime(hi))
            parts.append(base if j == 1 else "%s^%d" % (base, j))
        return " * ".join(parts)

    def __repr__(self):
        return "Champion(%s, ell=%d)" % (self.render(), self.ell)


def champion_factorization(xs, table):
    return Champion(table, xs)


def b1(x1, x2):
    """Structural benefit threshold min(x2^2 - 2 x2, x1/2 - sqrt(x1))."""
    return min(x2 * x2 - 2 * x2, x1 / 2 - mp_sqrt(x1))


@dataclass(frozen=True)
class E2Entry:
    q: int
    j: int
    p: int
    ell: int


def _e2_cache_path(cache_dir, ell_limit):
    return os.path.join(cache_dir, "e2-%d.txt" % ell_limit)


def build_e2_table(ell_limit, table, cache_dir=None):
    """All exponent-bump slopes in increasing order, each with the largest
    exponent-1 prime p of the champion just above it and l(N^+); stops at the
    first entry whose l exceeds ell_limit (kept, as the navigation fence)."""
    if ell_limit < 7:
        raise ValueError("ell_limit must be >= 7")
    if cache_dir is not None:
        cached = _load_e2_cache(cache_dir, ell_limit)
        if cached is not None:
            return cached

    cs = table.cumulative

    def sum_through(idx):  # primes p_1..p_idx
        return int(cs[idx - 1]) if idx else 0

    def rho_val(q, j):
        return mpf(q**j - q ** (j - 1)) / log_int(q)

    # merge the per-prime event streams (q^2-q)/log q < (q^3-q^2)/log q < ...
    heap = [(rho_val(2, 2), 2, 2), (rho_val(3, 2), 3, 2)]
    max_seeded = 3
    entries = []
    p_idx = 2  # largest prime with p/log p < r starts at 3 for the first event
    ell = 3    # champion just below the first event is 3 itself
    while True:
        r, q, j = heapq.heappop(heap)
        heapq.heappush(heap, (rho_val(q, j + 1), q, j + 1))
        if q == max_seeded:
            nq = table.next_prime(q)
            heapq.heappush(heap, (rho_val(nq, 2), nq, 2))
            max_seeded = nq
        new_idx = _largest_prime_ratio_below(table, r, p_idx)
        ell += sum_through(new_idx) - sum_through(p_idx)
        ell += q**j - q ** (j - 1)
        if q == 2 and j == 2:
            ell += 2  # 2/log 2 coincides with (2^2-2)/log 2: exponent jumps 0 -> 2
        p_idx = new_idx
        entries.append(E2Entry(q, j, table.prime(p_idx), ell))
        if ell > ell_limit:
            break
    if cache_dir is not None:
        _save_e2_cache(cache_dir, ell_limit, entries)
    return entries


def _largest_prime_ratio_below(table, r, lo_idx):
    """Largest index i >= lo_idx >= 2 with p_i / log p_i < r (monotone there)."""
    lo = max(lo_idx, 2)
    hi = len(table)
    if not _ratio_below(table.prime(lo), r):
        raise InvariantViolation("event slope below its own prime window")
    # exponential then binary search
    step = 1
    while lo + step <= hi and _ratio_below(table.prime(lo + step), r):
        lo += step
        step *= 2
    hi = min(lo + step, hi)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _ratio_below(table.prime(mid), r):
            lo = mid
        else:
            hi = mid - 1
    if lo >= len(table):
        raise CapacityError("prime table too small for event enumeration")
    return lo


def _ratio_below(p, r):
    return mpf(p) / log_int(p) < r


def _save_e2_cache(cache_dir, ell_limit, entries):
    os.makedirs(cache_dir, exist_ok=True)
    path = _e2_cache_path(cache_dir, ell_limit)
    tmp = path + ".tmp"
    with open(tmp, "w") as f:
        f.write("%s ell_limit=%d count=%d\n" % (E2_CACHE_VERSION, ell_limit, len(entries)))
        for e in entries:
            f.write("%d %d %d %d\n" % (e.q, e.j, e.p, e.ell))
    os.replace(tmp, path)


def _load_e2_cache(cache_dir, ell_limit):
    path = _e2_cache_path(cache_dir, ell_limit)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as f:
            header = f.readline().split()
            if header[0] != E2_CACHE_VERSION:
                return None
            count = int(header[2].split("=")[1])
            entries = []
            for line in f:
                q, j, p, l = map(int, line.split())
                entries.append(E2Entry(q, j, p, l))
        if len(entries) != count:
            return None
        return entries
    except Exception:
        return None


@dataclass
class SuperchampionContext:
    """Everything step 1 pins down for one n: the bracketing champions and
    the threshold geometry used by every later step."""

    n: int
    rho: Rho
    N: Champion
    ellN: int
    ell_nplus: int
    k: int          # index of the largest prime factor of N
    p_k: int
    xs: list
    x1: mpf
    x2: mpf
    sqrt_x1: mpf
    B1: mpf

    def covers(self, n):
        return self.ellN <= n < self.ell_nplus

    @property
    def table(self):
        return self.N.table


def find_context(n, table, e2_entries):
    """Locate the champion pair l(N) <= n < l(N') and derive the geometry."""
    if n < 7:
        raise ValueError("the superchampion path needs n >= 7")
    ells = [e.ell for e in e2_entries]
    i = bisect_right(ells, n) - 1
    if i < 0:
        raise InvariantViolation("event table starts above n")
    if i + 1 >= len(e2_entries):
        raise CapacityError("event table does not bracket n=%d; raise ell_limit" % n)
    cur, nxt = e2_entries[i], e2_entries[i + 1]
    t = nxt.ell - (nxt.q**nxt.j - nxt.q ** (nxt.j - 1))
    if t <= n:
        rho = Rho(nxt.q, nxt.j)
        ellN, ell_nplus = t, nxt.ell
    else:
        start_idx = table.rank(cur.p)
        cs = table.cumulative
        s0 = int(cs[start_idx - 1])
        # largest m >= start_idx with cur.ell + (S(p_m) - S(p_start)) <= n
        target = n - cur.ell + s0
        m = int(bisect_right_np(cs, target))
        if m < start_idx:
            m = start_idx
        ellN = cur.ell + int(cs[m - 1]) - s0
        nxt_p = table.prime(m + 1)
        rho = Rho(nxt_p, 1)
        ell_nplus = ellN + nxt_p
    xs = xj_thresholds(rho)
    N = champion_factorization(xs, table)
    if N.ell != ellN:
        raise InvariantViolation(
            "champion cost mismatch: factorization says %d, chain says %d" % (N.ell, ellN)
        )
    x1, x2 = xs[0].value, xs[1].value
    return SuperchampionContext(
        n=n,
        rho=rho,
        N=N,
        ellN=ellN,
        ell_nplus=ell_nplus,
        k=N.k,
        p_k=N.p_k,
        xs=xs,
        x1=x1,
        x2=x2,
        sqrt_x1=mp_sqrt(x1),
        B1=b1(x1, x2),
    )


def bisect_right_np(arr, target):
    import numpy as np

    return np.searchsorted(arr, target, side="right")
