import csv
import subprocess
import sys

import pytest

from dualgambit.cli import main

TOY = """\
cones lp 2
m 1
c 0 dense 1 1
b 1
a 0 0 dense 1 1
y0 0
"""


@pytest.fixture
def toy_file(tmp_path):
    path = tmp_path / "toy_lp.gco"
    path.write_text(TOY)
    return path


def test_solve_toy(toy_file, tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    assert main(["solve", str(toy_file), "--trace", str(trace)]) == 0
    out = capsys.readouterr().out
    assert "Optimal" in out and "<c,x>" in out and "<b,y>" in out
    gap = float(next(line for line in out.splitlines() if line.startswith("gap")).split()[1])
    assert gap <= 1e-8
    assert trace.read_text().startswith("k,phase,lambda,t,gap,alpha,bisections\n")


def test_solve_missing_file(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "missing.gco")]) == 64
    assert "cannot read" in capsys.readouterr().err


def test_solve_parse_error_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.gco"
    bad.write_text("cones lp 2\nm 1\nb one\n")
    assert main(["solve", str(bad)]) == 64
    assert "bad.gco:3:" in capsys.readouterr().err


def test_solve_validation_error(tmp_path):
    bad = tmp_path / "bad.gco"
    bad.write_text(TOY.replace("b 1", "b 0"))
    assert main(["solve", str(bad)]) == 64


def test_usage_errors(toy_file):
    assert main([]) == 64
    assert main(["solve", str(toy_file), "--beta", "1.5"]) == 64
    assert main(["solve", str(toy_file), "--controller", "nope"]) == 64
    assert main(["frobnicate"]) == 64


def test_iteration_limit_exit_code(tmp_path):
    path = tmp_path / "inst.gco"
    assert main(["gen", "--m", "3", "--n", "8", "--seed", "1", "--out", str(path)]) == 0
    assert main(["solve", str(path), "--max-iter", "2"]) == 2


def test_gen_then_solve(tmp_path, capsys):
    path = tmp_path / "inst.gco"
    assert main(["gen", "--m", "4", "--n", "9", "--seed", "3", "--out", str(path)]) == 0
    assert main(["solve", str(path), "--controller", "primal"]) == 0
    assert "Optimal" in capsys.readouterr().out


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.gco", tmp_path / "b.gco"
    main(["gen", "--m", "3", "--n", "6", "--seed", "9", "--out", str(a)])
    main(["gen", "--m", "3", "--n", "6", "--seed", "9", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_rejects_dimensions(tmp_path):
    assert main(["gen", "--m", "4", "--n", "5", "--out", str(tmp_path / "x")]) == 64


def test_bench_writes_csv(tmp_path):
    out = tmp_path / "stats.csv"
    assert main(["bench", "--m", "3", "--n", "6,8", "--count", "2", "--seed", "1", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [(r["m"], r["n"]) for r in rows] == [("3", "6"), ("3", "8")]
    assert all(r["count"] == "2" and r["failures"] == "0" for r in rows)


def test_module_entry_point(toy_file):
    res = subprocess.run([sys.executable, "-m", "dualgambit", "solve", str(toy_file)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "Optimal" in res.stdout
