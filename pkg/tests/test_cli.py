import io
import subprocess
import sys
from fractions import Fraction

import pytest

from harmonic_expansion.cli import (
    EXIT_INDETERMINATE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
    digits_to_bits,
    main,
    parse_range,
)
from harmonic_expansion import verification


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def fields(text):
    return dict(line.split(None, 1) for line in text.strip().splitlines())


def test_digits_to_bits():
    assert digits_to_bits(64) == 277
    assert digits_to_bits(16) == 118


def test_parse_range():
    assert parse_range("1..200") == range(1, 201)
    assert len(parse_range("5..1")) == 0


class TestCoeffs:
    def test_p2(self):
        code, out = run("coeffs", "--p-max", "2")
        assert code == EXIT_OK
        assert out == "1\t1/24\t1/12\n2\t-7/960\t-1/120\n"

    def test_p9_last_row(self):
        _, out = run("coeffs", "9")
        assert out.splitlines()[-1].split("\t")[2] == "140051/17459442"

    def test_csv(self):
        _, out = run("coeffs", "--p-max", "3", "--format", "csv")
        assert out.splitlines() == ["p,D_p,R_p", "1,1/24,1/12", "2,-7/960,-1/120", "3,31/8064,1/630"]

    @pytest.mark.parametrize("p_max", ["0", "201"])
    def test_out_of_range(self, p_max):
        assert run("coeffs", "--p-max", p_max)[0] == EXIT_USAGE


class TestEval:
    def test_ramanujan(self):
        code, out = run("eval", "--family", "ramanujan", "--n", "1", "--r", "1")
        f = fields(out)
        assert code == EXIT_OK and f["verdict"] == "PASS"
        assert f["residual"].startswith("-7.12")
        assert f["next_term_bound"].startswith("8.333")

    def test_dtw(self):
        code, out = run("eval", "--family", "dtw", "--n", "1", "--r", "0")
        f = fields(out)
        assert code == EXIT_OK and f["verdict"] == "PASS"
        assert f["residual"].startswith("1.73")
        assert abs(Fraction(f["next_term_bound"]) - Fraction(1, 54)) < Fraction(1, 10**18)

    def test_euler(self):
        code, out = run("eval", "--family", "euler", "--n", "10", "--K", "1")
        assert code == EXIT_OK and fields(out)["verdict"] == "PASS"

    def test_guard(self):
        assert run("eval", "--n", str(10**6 + 1), "--r", "1")[0] == EXIT_USAGE
        assert run("eval", "--n", "0", "--r", "1")[0] == EXIT_USAGE

    def test_csv(self):
        _, out = run("eval", "--n", "3", "--r", "2", "--format", "csv")
        header, row = out.strip().split("\n")
        assert header.split(",")[0] == "family" and row.split(",")[-1] == "PASS"


class TestVerify:
    def test_csv_output(self):
        code, out = run("verify", "--family", "ramanujan", "--n-range", "1..4", "--r-range", "1..3", "--format", "csv")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "family,n,r,theta,margin,classification"
        assert len(lines) == 13
        for _, _, _, printed, recomputed in verification.reclassify_csv(out):
            assert printed == recomputed

    def test_table_summary(self):
        code, out = run("verify", "--family", "dtw", "--n-range", "1..10", "--r-range", "1..8")
        f = fields(out)
        assert code == EXIT_OK
        assert f["cells"] == "80" and f["violations"] == "0" and f["indeterminate"] == "0"

    def test_output_file(self, tmp_path):
        target = tmp_path / "sweep.csv"
        run("verify", "--n-range", "1..2", "--r-range", "1..2", "--output", str(target))
        data = target.read_bytes()
        assert data.startswith(b"family,n,r,theta,margin,classification\n") and b"\r" not in data

    def test_empty_range(self):
        assert run("verify", "--n-range", "5..1", "--r-range", "1..2")[0] == EXIT_USAGE

    def test_bad_range_syntax(self):
        with pytest.raises(SystemExit) as info:
            run("verify", "--n-range", "1-5", "--r-range", "1..2")
        assert info.value.code == EXIT_USAGE

    def test_exit_codes(self, monkeypatch):
        monkeypatch.setattr(
            verification, "_theta_at", lambda f, n, r, bits: verification.rational_to_real(Fraction(1, 2**45), bits)
        )
        assert run("verify", "--n-range", "1..2", "--r-range", "1..1")[0] == EXIT_INDETERMINATE
        monkeypatch.setattr(
            verification, "_theta_at", lambda f, n, r, bits: verification.rational_to_real(Fraction(-1), bits)
        )
        assert run("verify", "--n-range", "1..2", "--r-range", "1..1")[0] == EXIT_VIOLATION


class TestGamma:
    def test_n100(self):
        code, out = run("gamma", "--n", "100", "--r", "3")
        assert code == EXIT_OK
        assert fields(out)["midpoint"].startswith("0.57721566490")

    def test_coarse_contains_fine_midpoint(self):
        coarse = fields(run("gamma", "--n", "10", "--r", "0")[1])
        fine = fields(run("gamma", "--n", "100", "--r", "3")[1])
        assert Fraction(coarse["lo"]) <= Fraction(fine["midpoint"]) <= Fraction(coarse["hi"])

    def test_n1000_width(self):
        f = fields(run("gamma", "--n", "1000", "--r", "4")[1])
        assert Fraction(f["width"]) < Fraction(1, 10**28)

    def test_precision_refusal(self, capsys):
        code, _ = run("gamma", "--n", "10000", "--r", "12")
        assert code == EXIT_USAGE
        assert "bits" in capsys.readouterr().err


def test_decompose():
    code, out = run("decompose", "--n", "1", "--r", "1")
    f = fields(out)
    assert code == EXIT_OK
    assert f["epsilon_r"].startswith("-3.608")
    assert f["total"] == f["direct_residual"]
    assert f["alpha_r"].startswith("9.23")


@pytest.mark.parametrize("digits", ["15", "10001", "abc"])
def test_precision_bounds(digits):
    with pytest.raises(SystemExit) as info:
        run("eval", "--n", "1", "--precision", digits)
    assert info.value.code == EXIT_USAGE


def test_deterministic_subprocess():
    cmd = [sys.executable, "-m", "harmonic_expansion", "verify", "--n-range", "1..5", "--r-range", "1..3", "--format", "csv"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.decode("ascii")
