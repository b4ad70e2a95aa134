import random

import pytest
from mpmath import mp, mpf

from landau.errors import CapacityError
from landau.oracle import g_list_merge_prune
from landau.superchampion import (
    Rho,
    b1,
    build_e2_table,
    champion_factorization,
    find_context,
    xj_thresholds,
)

FIG2 = [(1, 0), (3, 3), (6, 5), (12, 7), (60, 12), (420, 19), (4620, 30), (60060, 43)]


@pytest.fixture(scope="module")
def e2_1e5(table1m):
    return build_e2_table(10**5, table1m)


def test_e2_first_rows(e2_1e5):
    rows = [(e.q, e.j, e.p, e.ell) for e in e2_1e5]
    assert rows[0] == (2, 2, 3, 7)
    assert rows[4] == (5, 2, 47, 368)
    assert rows[10] == (3, 4, 271, 7453)


def test_e2_cache_roundtrip(table1m, tmp_path):
    d = str(tmp_path)
    a = build_e2_table(10**4, table1m, cache_dir=d)
    b = build_e2_table(10**4, table1m, cache_dir=d)
    assert a == b


def test_find_context_small(table1m, e2_1e5):
    ctx = find_context(12, table1m, e2_1e5)
    assert ctx.N.to_int() == 60 and ctx.ellN == 12
    assert mpf(5) / mp.log(5) <= ctx.rho.value <= mpf(7) / mp.log(7)
    ctx = find_context(43, table1m, e2_1e5)
    assert ctx.N.to_int() == 60060 and ctx.ellN == 43
    ctx = find_context(7, table1m, e2_1e5)
    assert ctx.N.to_int() == 12 and ctx.ellN == 7


def test_find_context_1e6(table1m):
    e2 = build_e2_table(10**6, table1m)
    ctx = find_context(10**6, table1m, e2)
    assert ctx.ellN == 998093
    assert ctx.N.render() == "2^9 * 3^6 * 5^4 * 7^3 * [11-41]^2 * [43-3923]"


def test_find_context_needs_bracket(table1m, e2_1e5):
    with pytest.raises(CapacityError):
        find_context(10**9, table1m, e2_1e5)
    with pytest.raises(ValueError):
        find_context(6, table1m, e2_1e5)


def test_champion_bracket_invariants(table1m, e2_1e5):
    rng = random.Random(3)
    for n in rng.sample(range(7, 10**5), 40):
        ctx = find_context(n, table1m, e2_1e5)
        assert ctx.ellN <= n < ctx.ell_nplus
        assert ctx.p_k < ctx.x1 <= table1m.next_prime(ctx.p_k)
        assert 2 < ctx.x2 < ctx.sqrt_x1 < ctx.rho.value < ctx.x1
        assert ctx.B1 > 0
        # exponents match the threshold formula for random primes
        for p in rng.sample(range(2, ctx.p_k + 1), 20):
            while not table1m.is_prime(p):
                p += 1
                if p > ctx.p_k:
                    p = 2
            a = ctx.N.alpha(p)
            assert a == sum(1 for x in ctx.xs if x.greater_than_int(p))


def test_xj_thresholds():
    xs = xj_thresholds(Rho(5, 1))
    assert xs[0].exact == 5
    assert xs[1].value > 2
    xs = xj_thresholds(Rho(7, 1))
    assert xs[0].exact == 7
    N = champion_factorization(xs, __import__("landau.primes", fromlist=["PrimeTable"]).PrimeTable.build(100))
    assert N.to_int() == 60  # the champion just below the slope 7/log 7
    with pytest.raises(ValueError):
        xj_thresholds(Rho(3, 1))


def test_xj_residuals(table1m):
    for rho in (Rho(3929, 1), Rho(3, 4), Rho(150991, 1)):
        xs = xj_thresholds(rho)
        for j, x in enumerate(xs, start=1):
            if x.exact is not None:
                continue
            if j == 1:
                resid = abs(x.value / mp.log(x.value) - rho.value)
            else:
                resid = abs((x.value**j - x.value ** (j - 1)) / mp.log(x.value) - rho.value)
            assert resid <= mpf(10) ** (-20) * rho.value


def test_b1_examples():
    assert abs(b1(mpf(25), mpf("4.2")) - mpf("7.5")) < mpf("1e-20")
    assert abs(b1(mpf(100), mpf(3)) - 3) < mpf("1e-20")


def test_champion_equals_g_of_its_cost(table1m, e2_1e5):
    lst = g_list_merge_prune(10**4)
    for m, l in FIG2:
        assert lst.query(l) == m
    # every champion cost <= 1e4 is a fixed point of g
    n = 7
    while n < 10**4:
        ctx = find_context(n, table1m, e2_1e5)
        assert lst.query(ctx.ellN) == ctx.N.to_int()
        n = ctx.ell_nplus


def test_divisibility_chain(table1m, e2_1e5):
    # consecutive champions differ by one prime, exponents non-increasing
    prev_ctx = None
    n = 7
    while n < 3000:
        ctx = find_context(n, table1m, e2_1e5)
        if prev_ctx is not None:
            a, b = prev_ctx.N.to_int(), ctx.N.to_int()
            assert b % a == 0
            q = b // a
            assert table1m.is_prime(q)
        prev_ctx = ctx
        alphas = [ctx.N.alpha(table1m.prime(i)) for i in range(1, ctx.k + 1)]
        assert alphas == sorted(alphas, reverse=True)
        assert all(a >= 1 for a in alphas)
        n = ctx.ell_nplus


def test_first_ten_thousand_champions_chain():
    # enumerate the first 1e4 champion steps: each multiplies in one prime
    # (a fresh exponent-1 prime between events, the event's q at an event)
    from landau.primes import PrimeTable

    table = PrimeTable.build(3 * 10**5)
    e2 = build_e2_table(5 * 10**8, table)
    steps = []  # (ell_after, q, new_exponent)
    ei = 0
    ell = 3
    steps.append((3, 3, 1))
    p_idx = 2
    while len(steps) < 10**4:
        e = e2[ei]
        nxt = table.rank(e.p)
        while p_idx < nxt and len(steps) < 10**4:
            p_idx += 1
            p = table.prime(p_idx)
            ell += p
            steps.append((ell, p, 1))
        if len(steps) >= 10**4:
            break
        ell += e.q**e.j - e.q ** (e.j - 1) + (2 if (e.q, e.j) == (2, 2) else 0)
        steps.append((ell, e.q, e.j))
        assert ell == e.ell
        ei += 1
    # sampled exact verification: consecutive champions differ by that prime
    rng = random.Random(5)
    for i in rng.sample(range(3, len(steps) - 1), 40):
        ell_lo, _, _ = steps[i]
        ell_hi, q, j = steps[i + 1]
        if ell_lo < 7:
            continue
        a = find_context(ell_lo, table, e2)
        b = find_context(ell_hi, table, e2)
        assert a.ellN == ell_lo and b.ellN == ell_hi
        assert b.N.alpha(q) == j and a.N.alpha(q) == j - 1
        for p in (2, 3, 5, 101, 1009):
            if p != q:
                assert a.N.alpha(p) == b.N.alpha(p)
