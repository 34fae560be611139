import subprocess
import sys

import numpy as np
import pytest

from lgh.cli import EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_NOT_ADMISSIBLE, EXIT_OK, EXIT_PARSE, main
from lgh.fixtures import build_spec, fixture
from lgh.formats import read_coef, write_coef, write_spec
from lgh.product import FourierTable


@pytest.fixture
def specs(tmp_path):
    out = {}
    for name, truncs in [("t2-sqrt2", (8, 8)), ("t2-liouville", (32, 32)), ("t1s3-aq", (8, 6))]:
        path = tmp_path / f"{name}.spec"
        write_spec(build_spec(fixture(name), *truncs), path)
        out[name] = path
    return out


def _single(spec_path, key, tmp_path, name="f.coef"):
    from lgh.formats import read_spec

    f = FourierTable.zeros(read_spec(spec_path).group)
    f.set_entry(key, 0, 0, 0, 0, 1.0)
    path = tmp_path / name
    path.write_text(write_coef(f))
    return path


def test_analyze(specs, tmp_path, capsys):
    assert main(["analyze", "--spec", str(specs["t2-liouville"])]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("LGH-REPORT v1 analyze")
    assert "GH = no-certified" in out and "liouville_witnesses:" in out
    assert "k=-110001 l=1000000 shell=1110001 M=2" in out


def test_require_certified(tmp_path, capsys):
    spec = tmp_path / "float.spec"
    spec.write_text("factor1 = T1\nfactor2 = T1\ntrunc1 = 8\ntrunc2 = 8\na = float:1.4142135623730951\n")
    assert main(["analyze", "--spec", str(spec)]) == EXIT_OK
    assert main(["analyze", "--spec", str(spec), "--require-certified"]) == EXIT_INCONCLUSIVE


def test_solve_single_entry(specs, tmp_path):
    rhs = _single(specs["t2-sqrt2"], (1, 1), tmp_path)
    out, report = tmp_path / "u.coef", tmp_path / "u.report"
    assert main(["solve", "--spec", str(specs["t2-sqrt2"]), "--rhs", str(rhs), "--out", str(out),
                 "--report", str(report)]) == EXIT_OK
    u = read_coef(out.read_text())
    assert u.blocks[(1, 1)].reshape(-1)[0] == pytest.approx(-1j / (1 + np.sqrt(2)), abs=1e-15)
    assert "admissible = true" in report.read_text()


def test_solve_obstruction(specs, tmp_path):
    rhs = _single(specs["t2-sqrt2"], (0, 0), tmp_path)
    report = tmp_path / "r.txt"
    args = ["solve", "--spec", str(specs["t2-sqrt2"]), "--rhs", str(rhs), "--out", str(tmp_path / "u.coef")]
    assert main(args + ["--report", str(report)]) == EXIT_NOT_ADMISSIBLE
    text = report.read_text()
    assert "admissible = false" in text and "offending:" in text
    assert not (tmp_path / "u.coef").exists()
    assert main(args + ["--project", "--report", str(report)]) == EXIT_OK
    assert "projected = true" in report.read_text()


def test_solve_full_chain(specs, tmp_path, capsys):
    rhs = _single(specs["t1s3-aq"], (1, 1), tmp_path)
    assert main(["solve", "--spec", str(specs["t1s3-aq"]), "--rhs", str(rhs), "--out", str(tmp_path / "u.coef")]) == 0
    line = next(l for l in capsys.readouterr().out.splitlines() if "relative_residual" in l)
    assert float(line.split("=")[1]) < 1e-7


def test_normal_form(specs, capsys):
    assert main(["normal-form", "--spec", str(specs["t1s3-aq"])]) == EXIT_OK
    out = capsys.readouterr().out
    # A(t) = -cos t
    assert "k=-1 re=-5.0000000000000000e-01" in out and "k=1 re=-5.0000000000000000e-01" in out
    assert "psi_grid_band" in out


def test_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.spec"
    bad.write_text("factor1 = T1\na = rational:1\n")
    assert main(["analyze", "--spec", str(bad)]) == EXIT_PARSE
    assert "factor2" in capsys.readouterr().err
    assert main(["analyze", "--spec", str(tmp_path / "missing.spec")]) == EXIT_PARSE


def test_example_and_verify(capsys):
    assert main(["example", "t2-imag"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("t2-imag: PASS")
    assert main(["verify", "symbols"]) == EXIT_OK
    assert "FAIL" not in capsys.readouterr().out


def test_failed_expectation_exit_code(monkeypatch, capsys):
    from dataclasses import replace

    from lgh import cli

    wrong = replace(fixture("t2-imag"), gh="no-certified")
    monkeypatch.setattr(cli, "fixture", lambda name: wrong)
    assert main(["example", "t2-imag"]) == EXIT_FAILED
    assert "FAIL GH" in capsys.readouterr().out


def test_deterministic_outputs(specs, tmp_path):
    rhs = _single(specs["t1s3-aq"], (1, 1), tmp_path)
    outs = []
    for run in range(2):
        paths = [tmp_path / f"a{run}.txt", tmp_path / f"u{run}.coef", tmp_path / f"s{run}.txt"]
        main(["analyze", "--spec", str(specs["t2-liouville"]), "--out", str(paths[0])])
        main(["solve", "--spec", str(specs["t1s3-aq"]), "--rhs", str(rhs), "--out", str(paths[1]),
              "--report", str(paths[2])])
        outs.append([p.read_bytes() for p in paths])
    assert outs[0] == outs[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lgh.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "analyze" in res.stdout
