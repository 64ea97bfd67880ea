import json
import subprocess
import sys

import pytest

from qtm.cli import main


def run(*args):
    return subprocess.run([sys.executable, "-m", "qtm", *args], capture_output=True, text=True)


def test_carnot_check_end_to_end(capsys):
    code = main(["fridge", "carnot-check", "--T", "10,5,4", "--E3", "1", "--g", "1e-3", "--p", "1e-3", "-q"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["carnot_performance"] == 2.0
    assert out["limit_performance"] == pytest.approx(2.0, rel=1e-9)


def test_unknown_flag_exit_1(capsys):
    assert main(["fridge", "steady", "--bogus"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("qtm-error kind=validation")
    assert "usage:" in err


def test_validation_exit_1(capsys):
    assert main(["fridge", "steady", "--T", "5,10,4", "-q"]) == 1
    line = capsys.readouterr().err.strip().splitlines()[0]
    assert line.startswith("qtm-error kind=validation reason=") and "T1 > T2 > T3" in line


def test_numerical_failure_exit_2(capsys, monkeypatch):
    import qtm.cli as cli
    from qtm.sweeps import CarnotCheck

    monkeypatch.setattr(cli, "carnot_check_fridge", lambda *a: CarnotCheck("fridge", 0.5, 2.0, 2.0, 1.0, 1.0, ("stall failed",)))
    assert main(["fridge", "carnot-check", "-q"]) == 2
    assert "qtm-error kind=numerical reason=stall failed" in capsys.readouterr().err


def test_empty_grid_header_only(tmp_path):
    out = tmp_path / "s.csv"
    res = run("fridge", "sweep", "--grid", "", "-o", str(out))
    assert res.returncode == 0
    assert "empty sweep grid" in res.stderr
    assert out.read_text().count("\n") == 1


def test_print_config(capsys):
    assert main(["fridge", "currents", "--print-config", "-q"]) == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["params"]["E2"] == 2.0 and cfg["format"] == "json"


def test_sweep_is_byte_identical(tmp_path):
    paths = [tmp_path / f"s{k}.csv" for k in (0, 1)]
    for p in paths:
        assert run("fridge", "sweep", "--grid", "0.3:0.9:7", "-q", "-o", str(p)).returncode == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text().count("\n") == 8
