"""Acceptance gate: every numbered criterion as an explicit test.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion; set LANDAU_EXTENDED=1 to include the long 10^12/10^15 cases.

Two sub-assertions are expected to fail and are analyzed in the reviewer
notes: the recorded event-table cardinality (1360) and the recorded
candidate-count histogram (1439/547/94) are not reproducible from their own
stated construction rules; the faithful enumerations here are independently
cross-verified.
"""

import random

import pytest
from mpmath import mp, mpf

from landau.assemble import Solver
from landau.benefit import BenefitTables, bound_loop, build_prefix_sets, estimate_B
from landau.gfunction import GEngine
from landau.oracle import g_bruteforce, g_list_merge_prune, g_table_dp
from landau.primes import PrimeTable
from landau.superchampion import build_e2_table, find_context

from conftest import EXTENDED, extended


@pytest.fixture(scope="module")
def solver1e5():
    return Solver(limit_hint=10**5)


@pytest.fixture(scope="module")
def oracle1e5():
    return g_list_merge_prune(10**5)


def test_criterion_1_oracle_equivalence(solver1e5, oracle1e5):
    """compute_g(n) == list-oracle g(n) for every n in [7, 1e5], exactly."""
    for n in range(7, 10**5 + 1):
        got = solver1e5.compute(n)
        want = oracle1e5.query(n)
        assert got.to_int() == want, "mismatch at n=%d" % n
    print("PASS criterion 1: oracle equivalence on [7, 1e5]")


def test_criterion_2_bruteforce_anchor():
    dp = g_table_dp(64)
    lst = g_list_merge_prune(64)
    for n in range(65):
        v = g_bruteforce(n).numerator()
        assert v == dp.int_value(n) == lst.query(n)
    print("PASS criterion 2: three-way agreement to 64")


def test_criterion_3_golden_1e6_and_1e9():
    s = Solver(limit_hint=10**9)
    r = s.compute(10**6)
    assert r.context.ellN == 998093
    assert r.correction.factors == ((43, 1), (3847, -1), (3947, 1))
    assert s.compute(10**6 - 1).correction == r.correction
    r = s.compute(10**9)
    assert r.context.ellN == 999969437
    assert r.correction.factors == (
        (2, -1), (3, -1), (37, 1), (148399, -1), (150991, 1))
    assert s.compute(10**9 - 1).correction == r.correction
    print("PASS criterion 3: golden factorizations at 1e6, 1e9")


@extended
def test_criterion_3x_golden_1e12_1e15(big_solver):
    r = big_solver.compute(10**12)
    assert r.context.ellN == 999997526071
    assert r.correction.factors == (
        (1621, 1), (1627, 1), (1637, 1), (5475739, -1), (5476469, -1), (5476483, 1))
    r = big_solver.compute(10**15)
    assert r.context.ellN == 999999940824564
    num = [192678823, 192678853, 192678883, 192678917]
    den = [389, 9539, 9587, 9601, 9619, 9623, 192665881]
    want = tuple(sorted([(p, 1) for p in num] + [(p, -1) for p in den]))
    assert r.correction.factors == want
    assert big_solver.compute(10**15 - 1).correction == r.correction
    print("PASS criterion 3x: golden factorizations at 1e12, 1e15")


FIG2 = [(1, 0), (3, 3), (6, 5), (12, 7), (60, 12), (420, 19), (4620, 30), (60060, 43)]


def test_criterion_4_champions_and_event_rows(table1m):
    lst = g_list_merge_prune(100)
    for value, ell in FIG2:
        assert lst.query(ell) == value
    e2 = build_e2_table(10**4, table1m)
    for value, ell in FIG2[3:]:
        ctx = find_context(ell, table1m, e2)
        assert ctx.ellN == ell and ctx.N.to_int() == value
    rows = [(e.q, e.j, e.p, e.ell) for e in e2]
    assert rows[0] == (2, 2, 3, 7)
    assert rows[4] == (5, 2, 47, 368)
    assert rows[10] == (3, 4, 271, 7453)
    print("PASS criterion 4: first champions and event rows")


@extended
def test_criterion_4x_full_event_table_count(big_solver):
    e2 = build_e2_table(10**15, big_solver.table)
    # recorded reference cardinality; the reviewer notes analyze the gap
    assert len(e2) == 1360, "faithful enumeration yields %d entries" % len(e2)
    print("PASS criterion 4x: full event table count")


def test_criterion_5_g_values(table1m):
    eng = GEngine(table1m)
    f = eng.g_fraction(103, 22)
    assert (f.Qs, f.qs) == ((107, 113), (101, 97))
    f = eng.g_fraction(107, 12)
    assert (f.Qs, f.qs) == ((109,), (97,))
    # both algorithms agree across the full overlap band at p_k = 9973
    d1 = eng.delta1(table1m.next_prime(9973))
    lo = -(-9 * d1 // 2)
    rng_all = eng.g_small(9973, 3000)
    for m in range(lo + (lo & 1), 3001, 2):
        assert eng.g_large(9973, m) == rng_all[m]
    print("PASS criterion 5: G values and algorithm agreement on [%d, 3000]" % lo)


def test_criterion_5_large_argument_completes():
    t = PrimeTable.build(195 * 10**6)
    eng = GEngine(t)
    f = eng.g_fraction(192678883, 688930)
    assert f.cost <= 688930 and not f.is_one()
    print("PASS criterion 5: G(192678883, 688930) completes")


def test_criterion_6_benefit_regression():
    n = 1000064448
    from landau.primes import auto_limit

    t = PrimeTable.build(auto_limit(n))
    e2 = build_e2_table(n + 10, t)
    ctx = find_context(n, t, e2)
    tables = BenefitTables(ctx)
    rho = ctx.rho.value
    d = build_prefix_sets(ctx, mpf("0.6") * rho, tables)
    assert len(d) == 76
    res = estimate_B(ctx, d, n, tables)
    assert abs(res.B / rho - mpf("1.104")) <= mpf("0.005") * mpf("1.104")
    assert len(build_prefix_sets(ctx, rho, tables)) == 194
    print("PASS criterion 6: candidate-set sizes and bound at n=1000064448")


def test_criterion_7_prefix_counts():
    s = Solver(limit_hint=2 * 10**6)
    res, det = s.compute(10**6 + 366, details=True)
    assert len(det.d_set) == 51
    ratio = det.bound.B / det.ctx.rho.value
    assert abs(ratio - mpf("0.9186")) <= mpf("0.005") * mpf("0.9186")
    print("PASS criterion 7: worst-case candidate count at 1e6+366")


def test_criterion_7_histogram():
    s = Solver(limit_hint=2 * 10**6)
    hist = {}
    for n in range(998001, 10**6 + 1):
        _, det = s.compute(n, details=True)
        c = len(det.candidates)
        hist[c] = hist.get(c, 0) + 1
    # recorded reference histogram; the reviewer notes analyze the gap
    assert (hist.get(1), hist.get(2), hist.get(3)) == (1439, 547, 94), (
        "faithful histogram is %r" % hist)
    print("PASS criterion 7: normalized-prefix histogram")


def test_criterion_8_gap_values(table1m):
    assert table1m.max_gap_upto(10**2) == 8
    assert table1m.max_gap_upto(10**4) == 36
    assert table1m.max_gap_upto(10**6) == 114
    print("PASS criterion 8: maximal gap values")


@extended
def test_criterion_8x_delta1(big_solver):
    eng = big_solver.engine
    assert eng.delta1(252314747) == 900
    print("PASS criterion 8x: delta1(252314747) = 900")


def test_criterion_9_property_suite(table1m, solver1e5):
    rng = random.Random(97)
    eng = GEngine(table1m)
    lst = g_list_merge_prune(5000)
    e2 = build_e2_table(10**4, table1m)
    for n in rng.sample(range(7, 5000), 120):
        res = solver1e5.compute(n)
        assert res.ell_g <= n
        assert res.to_int() == lst.query(n)
        res.check_bounds()  # effective minorant/majorant and largest-prime bound
    # benefits: non-negative, additive, zero only at the champion
    ctx = find_context(10**6, table1m, build_e2_table(2 * 10**6, table1m))
    tables = BenefitTables(ctx)
    for p in tables.sp_primes:
        for gamma in range(-tables.alphas[p], 4):
            assert tables.benp(p, gamma) >= 0
    d = build_prefix_sets(ctx, ctx.rho.value, tables)
    for cand in rng.sample(d, 25):
        recomputed = cand.dell - ctx.rho.value * cand.delta.log
        assert abs(recomputed - cand.ben) <= mpf(10) ** (-mp.dps + 6) * max(1, abs(cand.ben))
    for i in range(len(d) - 1):
        assert d[i].dell < d[i + 1].dell
    # sandwich bound on every computed G over random arguments
    for _ in range(40):
        pk = table1m.prime(rng.randint(3, 500))
        pk1 = table1m.next_prime(pk)
        m = rng.randint(0, min(300, pk1 - 3))
        f = eng.g_fraction(pk, m)
        num, den = f.numerator(), f.denominator()
        q = table1m.next_prime(pk1 - m - 1)
        if q <= pk:
            assert num * q >= den * pk1
        assert num * (pk1 - m) <= den * pk1
    # rendering round-trip
    from landau.arith import parse_factored
    from test_arith import rand_fraction

    for _ in range(2000):
        f = rand_fraction(rng)
        assert parse_factored(f.render(table1m), table1m) == f
    print("PASS criterion 9: property suite")


@pytest.fixture(scope="session")
def big_solver(cache_dir):
    if not EXTENDED:
        pytest.skip("extended fixture")
    return Solver(limit_hint=10**15, cache_dir=cache_dir)
