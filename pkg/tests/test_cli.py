import csv
import subprocess
import sys

import numpy as np
import pytest

from phasespeed.cli import main
from phasespeed.metrics import closed_form_fidelity
from phasespeed.oracles import free_quench_scaling


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_stationary_run(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, "scenario = stationary\n"), "--out", str(out)]) == 0
    rows = read_rows(out / "series.csv")
    assert {r["bound"] for r in rows} == {"qsl", "ssl"}
    assert all(float(r["overlap"]) == 1.0 and float(r["rate"]) == 0.0 for r in rows)
    assert "result: PASS" in (out / "summary.txt").read_text()
    assert "result: PASS" in capsys.readouterr().out


def test_first_excited_quench_follows_closed_form(tmp_path):
    cfg = "scenario = quench-quantum\n[state]\nkind = ho-eigenstate 1\n[bounds]\nevaluate = qsl\n"
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, cfg), "--out", str(out)]) == 0
    rows = read_rows(out / "series.csv")
    t = np.array([float(r["t"]) for r in rows])
    f = np.array([float(r["overlap"]) for r in rows])
    b, bdot = free_quench_scaling(t, 1.0)
    f0 = closed_form_fidelity(0, b, bdot, 1.0)
    assert np.max(np.abs(f - f0**3)) < 1e-5


def test_output_dir_from_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["run", write(tmp_path, "scenario = stationary\n[output]\ndir = here\n")]) == 0
    assert (tmp_path / "here" / "series.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    path = write(tmp_path, "scenario = quench-classical\n[grid]\nnn = 3\n")
    assert main(["run", path, "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "nn" in err
    assert not (tmp_path / "o").exists()


def test_missing_config_exit_code(tmp_path):
    assert main(["run", str(tmp_path / "absent.cfg")]) == 2


def test_numeric_failure_exit_code(tmp_path, capsys):
    # a grid only 3 sigma wide truncates the state: the boundary warning is escalated
    cfg = "scenario = quench-classical\n[grid]\nn = 64\nhalfwidth_sigmas = 3\n"
    assert main(["run", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 3
    assert "BoundaryWarning" in capsys.readouterr().err


def test_verify_all_coarse_grid_fails(capsys):
    assert main(["verify-all", "--grid-n", "64"]) == 1
    out = capsys.readouterr()
    assert "FAIL  convergence.grid-doubling" in out.out
    assert "failing:" in out.err


@pytest.mark.slow
def test_verify_all_default_grid_passes(capsys):
    assert main(["verify-all"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") >= 19


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "phasespeed", "--help"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "verify-all" in proc.stdout
