"""Baseline algorithms computing g(n) for every n <= N at small scale.

These are the ground truth the fast single-n path is validated against:
a dynamic program over primes (storing factored values and comparing by
logs), a merge-and-prune champion list, and a tiny exhaustive search.
"""

import heapq
import math
from bisect import bisect_right

import numpy as np

from .arith import PrimeFraction
from .errors import CapacityError, InvariantViolation
from . import primes as primes_mod

DP_MAX_N = 2_000_000
LIST_MAX_N = 2_000_000
BRUTE_MAX_N = 64


def _pmax(N):
    # Largest prime factor of g(n) is <= 1.328*sqrt(n log n) for n >= 5;
    # take 3 as a floor so tiny tables still see {2, 3}.
    if N < 3:
        return 2
    return max(3, int(1.328 * math.sqrt(N * math.log(N))))


class GTable:
    """g(n) for all 0 <= n <= limit, with factored access per entry."""

    def __init__(self, limit, values, prime_pool):
        self.limit = limit
        self.values = values          # object ndarray of exact ints
        self._pool = prime_pool       # primes that may divide any entry

    def int_value(self, n):
        return int(self.values[n])

    def factors(self, n):
        """Factorization of g(n) as a dict prime -> exponent."""
        v = int(self.values[n])
        fac = {}
        for p in self._pool:
            if p * p > v:
                break
            e = 0
            while v % p == 0:
                e += 1
                v //= p
            if e:
                fac[p] = e
        if v > 1:
            fac[v] = fac.get(v, 0) + 1
        return fac

    def value(self, n):
        return PrimeFraction.from_factors(self.factors(n))

    def __len__(self):
        return self.limit + 1


def g_table_dp(N, max_n=DP_MAX_N):
    """Prime-by-prime dynamic program g_j(n) = max_k p_j^k g_{j-1}(n - p_j^k).

    Cells hold exact integers in an object ndarray so the per-prime update is
    one vectorized multiply plus one vectorized max; ~10^6 is minutes of work.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if N > max_n:
        raise CapacityError("dp table for N=%d exceeds budget %d" % (N, max_n))
    g = np.ones(N + 1, dtype=object)
    pool = primes_mod._simple_sieve(_pmax(N)).tolist() if N >= 2 else []
    for p in pool:
        if p > N:
            break
        base = g.copy()
        q = p
        while q <= N:
            np.maximum(g[q:], base[: N + 1 - q] * q, out=g[q:])
            q *= p
    return GTable(N, g, pool)


class ChampionList:
    """Ordered pairs (M_i, l_i), both strictly increasing; g(n) = M_i for
    l_i <= n < l_{i+1}."""

    def __init__(self, values, ells):
        self.values = values
        self.ells = ells

    def query(self, n):
        i = bisect_right(self.ells, n)
        if i == 0:
            raise ValueError("n below table start")
        return self.values[i - 1]

    def check(self):
        if self.values[0] != 1 or self.ells[0] != 0:
            raise InvariantViolation("champion list must start at (1, 0)")
        for i in range(1, len(self.values)):
            if not (self.values[i] > self.values[i - 1] and self.ells[i] > self.ells[i - 1]):
                raise InvariantViolation("champion list not doubly increasing at %d" % i)

    def __len__(self):
        return len(self.values)


def _prune(pairs):
    # keep (M, l) only if every later (larger-M) entry has strictly larger l
    out = []
    for v, l in pairs:
        while out and out[-1][1] >= l:
            out.pop()
        out.append((v, l))
    return out


def g_list_merge_prune(N, max_prime=None, max_n=LIST_MAX_N):
    """Champion-list construction: merge in one prime at a time, prune
    dominated entries (smaller value at equal-or-higher cost)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if N > max_n:
        raise CapacityError("champion list for N=%d exceeds budget %d" % (N, max_n))
    if max_prime is None:
        max_prime = _pmax(N)
    pairs = [(1, 0)]
    for p in primes_mod._simple_sieve(max(max_prime, 2)).tolist():
        if p > N:
            break
        streams = []
        q = p
        k = 1
        while q <= N:
            streams.append([(v * q, l + q) for v, l in pairs if l + q <= N])
            q *= p
            k += 1
        merged = heapq.merge(pairs, *streams)
        pairs = _prune(merged)
    values, ells = zip(*pairs)
    lst = ChampionList(list(values), list(ells))
    lst.check()
    return lst


def g_bruteforce(n):
    """Direct maximization of prod p_i^a_i subject to sum p_i^a_i <= n
    over distinct primes; exponential, for tiny n only."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > BRUTE_MAX_N:
        raise CapacityError("brute force beyond n=%d refused" % BRUTE_MAX_N)
    ps = [p for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61) if p <= n]

    def best(i, budget):
        if i == len(ps) or ps[i] > budget:
            return 1
        top = best(i + 1, budget)
        q = ps[i]
        while q <= budget:
            top = max(top, q * best(i + 1, budget - q))
            q *= ps[i]
        return top

    return PrimeFraction.from_int(best(0, n))
