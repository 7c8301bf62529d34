import json
from fractions import Fraction

import pytest

from circlekit import cli


def run(args):
    return cli.main(args)


def test_sieve_checksums(capsys):
    assert run(["sieve", "--limit", "10"]) == 0
    out = capsys.readouterr().out
    assert "sum r(n)         36" in out
    assert "sum d(n)         27" in out


def test_sieve_usage_error(capsys):
    assert run(["sieve", "--limit", "0"]) == 2
    assert "usage error" in capsys.readouterr().err


def test_unknown_command_exits_2():
    assert run(["definitely-not-a-command"]) == 2


def test_error_term_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "p.csv"
    rc = run(["error-term", "circle", "--x-max", "200", "--samples", "12",
              "--out", str(out)])
    assert rc == 0
    header, rows = cli.read_csv(str(out))
    assert header == ["x", "value", "ratio_quarter", "ratio_huxley"]
    assert len(rows) == 12
    assert all(isinstance(r[0], (int, float)) for r in rows)
    manifest = json.loads((tmp_path / "p.csv.manifest.json").read_text())
    assert manifest["command"] == "error-term"
    assert manifest["sieve_limit"] == 200
    assert manifest["tool_version"]
    assert "wall_time" in manifest and "seed" in manifest and "parameters" in manifest


def test_error_term_rejects_zero_samples(tmp_path):
    rc = run(["error-term", "circle", "--x-max", "100", "--samples", "0",
              "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_capacity_exit_code(tmp_path, capsys):
    rc = run(["error-term", "circle", "--x-max", "1000", "--samples", "4",
              "--limit", "100", "--out", str(tmp_path / "x.csv")])
    assert rc == 3
    assert "capacity error" in capsys.readouterr().err


def test_correlate_round_trip(tmp_path):
    out = tmp_path / "corr.csv"
    assert run(["correlate", "--n", "10", "--h-max", "3", "--out", str(out)]) == 0
    header, rows = cli.read_csv(str(out))
    assert header == ["N", "h", "raw", "main", "e_value"]
    assert rows[0][:3] == [10, 1, 96]
    assert rows[0][3] == Fraction(80, 1)
    assert isinstance(rows[0][3], Fraction)
    assert rows[0][4] == 16.0


def test_laplace_circle_scan(tmp_path, capsys):
    out = tmp_path / "lap.csv"
    rc = run(["laplace", "circle", "--t-list", "16..64", "--limit", "4000",
              "--out", str(out)])
    assert rc == 0
    header, rows = cli.read_csv(str(out))
    assert header == ["T", "integral", "truncation_bound", "main_term", "residual", "ratio_t23"]
    assert [r[0] for r in rows] == [16.0, 32.0, 64.0]
    printed = capsys.readouterr().out
    assert "slope" in printed


def test_constants_command(capsys):
    assert run(["constants", "r_squared", "--terms", "20000"]) == 0
    out = capsys.readouterr().out
    assert "closed form       50.15605614" in out
    assert "closed form in [partial, partial+tail]: yes" in out


def test_gauss_command(capsys):
    assert run(["gauss", "--k-max", "30"]) == 0
    out = capsys.readouterr().out
    assert "0 outside" in out


def test_voronoi_command(capsys):
    assert run(["voronoi", "--x", "1000.5", "--n-terms", "1000"]) == 0
    out = capsys.readouterr().out
    assert "P(x) exact" in out


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["correlate", "--n", "500", "--h-max", "8"]
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_precision_flag(tmp_path):
    out5 = tmp_path / "p5.csv"
    out17 = tmp_path / "p17.csv"
    base = ["error-term", "circle", "--x-max", "50", "--samples", "5"]
    assert run(["--precision", "5"] + base + ["--out", str(out5)]) == 0
    assert run(base + ["--out", str(out17)]) == 0
    first5 = out5.read_text().splitlines()[1].split(",")[1]
    first17 = out17.read_text().splitlines()[1].split(",")[1]
    assert len(first5) <= len(first17)


def test_format_value_rationals():
    assert cli.format_value(Fraction(80, 1), 17) == "80/1"
    assert cli.format_value(Fraction(-32, 3), 17) == "-32/3"
    assert cli.format_value(10, 17) == "10"
