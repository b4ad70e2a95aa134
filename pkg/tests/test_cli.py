import json

import pytest
from mpmath import mp, workdps

from landau import cli
from landau.arith import parse_factored
from landau.primes import PrimeTable


def run_cli(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_compute_digits(capsys):
    rc, out, _ = run_cli(capsys, "compute", "5", "--format", "digits")
    assert rc == 0 and out.strip() == "6"
    rc, out, _ = run_cli(capsys, "compute", "19", "--format", "digits")
    assert rc == 0 and out.strip() == "420"


def test_compute_factored_1e6(capsys):
    rc, out, _ = run_cli(capsys, "compute", "1000000")
    assert rc == 0
    assert "N = 2^9 * 3^6 * 5^4 * 7^3 * [11-41]^2 * [43-3923]" in out
    assert "ell(N) = 998093" in out
    assert "g(n) = (43 * 3947) / (3847) * N" in out


def test_compute_json_schema_and_log(capsys):
    rc, out, _ = run_cli(capsys, "compute", "1000000", "--format", "json")
    assert rc == 0
    payload = json.loads(out)
    assert set(payload) == {
        "n", "rho", "ellN", "N_brackets", "correction_num", "correction_den",
        "ell_g", "log10_g",
    }
    assert payload["ellN"] == 998093
    assert payload["correction_num"] == str(43 * 3947)
    assert payload["correction_den"] == "3847"
    # log10_g agrees with an independent recomputation from the rendering
    table = PrimeTable.build(10**4)
    N = parse_factored(payload["N_brackets"], table)
    with workdps(45):
        log10 = (
            N.log
            + mp.log(int(payload["correction_num"]))
            - mp.log(int(payload["correction_den"]))
        ) / mp.log(10)
        assert mp.nstr(log10, 25) == payload["log10_g"]


def test_table_rows(capsys):
    rc, out, _ = run_cli(capsys, "table", "0", "7", "--format", "digits")
    assert rc == 0
    vals = [int(line.split("\t")[1]) for line in out.strip().splitlines()]
    assert vals == [1, 1, 2, 3, 4, 6, 6, 12]
    rc, out, _ = run_cli(capsys, "table", "5", "5", "--format", "digits")
    assert out.strip() == "5\t6"


def test_table_constant_middle_part(capsys):
    rc, out, _ = run_cli(capsys, "table", "31000", "31005")
    assert rc == 0
    table = PrimeTable.build(10**4)
    middles = []
    for line in out.strip().splitlines():
        f = parse_factored(line.split("\t")[1], table)
        middles.append(tuple((p, e) for p, e in f.factors if 19 <= p <= 509))
    assert len(set(middles)) == 1
    assert all(e == 1 for p, e in middles[0])
    assert len(middles[0]) == table.count_upto(509) - table.count_upto(18)


def test_table_range_guard(capsys):
    rc, _, err = run_cli(capsys, "table", "0", "2000000")
    assert rc == cli.EXIT_CAPACITY


def test_verify_ok(capsys):
    rc, out, _ = run_cli(capsys, "verify", "2000")
    assert rc == 0
    assert out.strip() == "1994/1994 OK"


def test_verify_detects_injected_fault(capsys, monkeypatch):
    from landau import assemble

    real = assemble.Solver.compute

    def faulty(self, n, details=False):
        res = real(self, n, details=details)
        if n == 1234:
            res.correction = res.correction.mul_prime_power(2, 1)
        return res

    monkeypatch.setattr(assemble.Solver, "compute", faulty)
    rc, out, _ = run_cli(capsys, "verify", "1500")
    assert rc == cli.EXIT_FAIL
    assert "MISMATCH at n=1234" in out


def test_gfun(capsys):
    rc, out, _ = run_cli(capsys, "gfun", "103", "22")
    assert rc == 0
    assert "G(103, 22) = (107*113) / (101*97)" in out
    assert "cost = 22" in out


def test_superchampion_cmd(capsys):
    rc, out, _ = run_cli(capsys, "superchampion", "43")
    assert rc == 0
    assert "ell(N) = 43" in out and "2^2 * [3-13]" in out


def test_prefixes_cmd(capsys):
    rc, out, _ = run_cli(capsys, "prefixes", "1000366")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# n = 1000366")
    assert any(line.startswith("1 ") for line in lines[1:])


def test_precision_guard(capsys):
    rc, _, err = run_cli(capsys, "--precision", "10", "compute", "100")
    assert rc == cli.EXIT_FAIL


def test_config_validation():
    with pytest.raises(ValueError):
        cli.Config(precision_digits=19)
    with pytest.raises(ValueError):
        cli.Config(digit_budget=10)
