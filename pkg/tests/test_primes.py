import math

import numpy as np
import pytest

from landau.errors import CapacityError
from landau.primes import PrimeTable, auto_limit


def test_build_small():
    t = PrimeTable.build(10)
    assert t.primes.tolist() == [2, 3, 5, 7]


def test_cumulative_sum_at_29():
    t = PrimeTable.build(30)
    assert t.sum_upto(29) == 129
    assert t.sum_upto(30) == 129


def test_prime_count_1e6(table1m):
    assert table1m.count_upto(10**6) == 78498


def test_next_prime():
    t = PrimeTable.build(1000)
    assert t.next_prime(7) == 11
    assert t.next_prime(113) == 127
    assert t.next_prime(2) == 3
    with pytest.raises(CapacityError):
        t.next_prime(997)
    with pytest.raises(ValueError):
        t.next_prime(0)


def test_prev_prime():
    t = PrimeTable.build(1000)
    assert t.prev_prime(11) == 7
    assert t.prev_prime(128) == 127
    assert t.prev_prime(3) == 2


def test_sum_prime_range():
    t = PrimeTable.build(1000)
    assert t.sum_prime_range(1, 4) == 17
    assert t.sum_prime_range(1, 10) == 129
    assert t.sum_prime_range(5, 5) == 11
    with pytest.raises(IndexError):
        t.sum_prime_range(0, 3)


def test_max_gap_values(table1m):
    assert table1m.max_gap_upto(100) == 8
    assert table1m.max_gap_upto(10**4) == 36
    assert table1m.max_gap_upto(10**6) == 114


def test_gap_bound_and_monotone(table1m):
    g = table1m.gaps
    assert all(
        gap <= 0.93 * math.log(p) ** 2
        for p, gap in zip(g.record_primes.tolist(), g.record_gaps.tolist())
        if p > 10
    )
    assert list(g.record_gaps) == sorted(g.record_gaps)


def test_navigation_roundtrip():
    t = PrimeTable.build(10**5)
    ps = t.primes.tolist()
    for p in ps[1:]:
        assert t.next_prime(p - 1) == p
    for p in ps[:-1]:
        assert t.prev_prime(p + 1) == p


def test_cumulative_matches_fold(table1m):
    ps = table1m.primes.tolist()
    acc = 0
    fold = []
    for p in ps:
        acc += p
        fold.append(acc)
    assert fold == table1m.cumulative.tolist()


def test_capacity_budget():
    with pytest.raises(CapacityError):
        PrimeTable.build(10**7, max_limit=10**6)


def test_rank_and_is_prime():
    t = PrimeTable.build(100)
    assert t.rank(2) == 1 and t.rank(97) == 25
    assert t.prime(25) == 97
    assert t.is_prime(89) and not t.is_prime(91)
    with pytest.raises(ValueError):
        t.rank(91)


def test_disk_cache_roundtrip(tmp_path):
    d = str(tmp_path)
    t1 = PrimeTable.build(10**4, cache_dir=d)
    t2 = PrimeTable.build(10**4, cache_dir=d)
    assert t1.primes.tolist() == t2.primes.tolist()
    # smaller request slices the cached table
    t3 = PrimeTable.build(5000, cache_dir=d)
    assert t3.limit == 5000 and t3.primes[-1] <= 5000
    assert t3.count_upto(5000) == t1.count_upto(5000)
    # larger request rebuilds
    t4 = PrimeTable.build(2 * 10**4, cache_dir=d)
    assert t4.count_upto(10**4) == t1.count_upto(10**4)
    # corrupted cache falls back to a rebuild
    path = t1._cache_path(d)
    with open(path, "wb") as f:
        f.write(b"garbage")
    t5 = PrimeTable.build(10**4, cache_dir=d)
    assert t5.primes.tolist() == t1.primes.tolist()


def test_auto_limit_covers_grantham():
    for n in (10**6, 10**9, 10**12, 10**15):
        assert auto_limit(n) > 1.328 * math.sqrt(n * math.log(n))


def test_immutability(table1m):
    with pytest.raises(ValueError):
        table1m.primes[0] = 1
