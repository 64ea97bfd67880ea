import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtm.config import DEFAULTS, allowed_keys, load_config, parse_grid
from qtm.errors import ConfigError
from qtm.io import SCHEMA, emit_results, load_json, pairs_to_matrix, to_csv, to_json
from qtm.observables import fridge_report
from qtm.solvers import fridge_steady_state
from qtm.sweeps import carnot_check_fridge, sweep_fridge

MINIMAL = {"E1": 1, "E3": 1, "T": [10, 5, 4], "g": 0.01, "p": [1e-3, 1e-3, 1e-3]}


def write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return path


def test_minimal_config_derives_E2(tmp_path, caplog):
    caplog.set_level("INFO", logger="qtm")
    cfg = load_config(write(tmp_path, MINIMAL), "fridge", "currents")
    assert cfg.fridge_spec().qubit2.energy == 2.0
    assert cfg.resolved()["params"]["E2"] == 2.0
    assert "E2 = E1 + E3 = 2.0" in caplog.text
    assert "default applied: axis" in caplog.text


def test_ordering_error_names_constraint(tmp_path):
    with pytest.raises(ConfigError, match="requires T1 > T2 > T3"):
        load_config(write(tmp_path, {**MINIMAL, "T": [5, 10, 4]}), "fridge", "steady")


def test_explicit_E2_mismatch(tmp_path):
    with pytest.raises(ConfigError, match="E2 = E1 \\+ E3"):
        load_config(write(tmp_path, {**MINIMAL, "E2": 2.5}), "fridge", "steady")
    cfg = load_config(write(tmp_path, {**MINIMAL, "E2": 2.0}), "fridge", "steady")
    assert cfg.fridge_spec().qubit2.energy == 2.0


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(write(tmp_path, {**MINIMAL, "E_1": 1}), "fridge", "steady")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(None, "engine", "run", {"axis": "E1"})


def test_parse_error_has_position(tmp_path):
    with pytest.raises(ConfigError, match=r"cfg.json:2:\d+"):
        load_config(write(tmp_path, '{"E1": 1,\n "E3": }'), "fridge", "steady")


def test_flags_override_file(tmp_path):
    cfg = load_config(write(tmp_path, MINIMAL), "fridge", "steady", {"E1": 3.0, "p": 0.01})
    assert cfg.params["E1"] == 3.0 and cfg.params["p"] == [0.01] * 3


def test_type_errors(tmp_path):
    for bad in ({"g": "small"}, {"T": 5}, {"p": [1e-3, 1e-3]}, {"g": True}):
        with pytest.raises(ConfigError):
            load_config(write(tmp_path, {**MINIMAL, **bad}), "fridge", "steady")


def test_engine_defaults():
    cfg = load_config(None, "engine", "run")
    spec = cfg.engine_spec()
    assert spec.qubit1.energy == 1.5 and spec.initial_level == 20
    with pytest.raises(ConfigError, match="E1 = E2 \\+ E3"):
        load_config(None, "engine", "run", {"E1": 2.0})


def test_defaults_table_keys_allowed():
    for machine, table in DEFAULTS.items():
        assert set(table) <= allowed_keys(machine)


def test_parse_grid():
    assert parse_grid("") == []
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("0.1,0.2") == [0.1, 0.2]
    with pytest.raises(ConfigError):
        parse_grid("0:1")


def test_csv_header_and_rows(tmp_path):
    template = {"E1": 1.0, "E3": 1.0, "T": (10.0, 5.0, 4.0), "p": 1e-3, "g": 1e-2}
    text = to_csv(sweep_fridge(template, "T2", [5.0, 20.0]))
    lines = text.splitlines()
    assert lines[0] == "param,Q1,Q2,Q3,W,J,dq1,dq2,dq3,Teff1,Teff2,Teff3,cop_or_eff,status"
    assert lines[1].endswith(",ok") and lines[2].split(",")[-1].startswith("error:SpecError")
    assert to_csv(sweep_fridge(template, "E1", [])) == lines[0] + "\n"


def test_carnot_json_fields():
    data = json.loads(to_json(carnot_check_fridge(10, 5, 4, 1.0, 1e-3, 1e-3)))
    assert data["schema"] == SCHEMA
    for key in ("limit_performance", "carnot_performance", "difference"):
        assert key in data
    assert data["carnot_performance"] == 2.0


def test_round_trip_bit_exact(tmp_path, fridge):
    ss = fridge_steady_state(fridge)
    path = tmp_path / "ss.json"
    emit_results(ss, "json", path, fridge)
    back = load_json(path)
    assert np.array_equal(pairs_to_matrix(back["state"]), ss.state)
    rep = fridge_report(ss, fridge)
    emit_results(rep, "json", tmp_path / "rep.json")
    data = load_json(tmp_path / "rep.json")
    assert tuple(data["Q"]) == rep.Q and data["J"] == rep.J


@settings(max_examples=200)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=5))
def test_reals_round_trip(values):
    text = json.dumps({"schema": SCHEMA, "v": values})
    assert json.loads(text)["v"] == values


def test_load_json_checks_schema(tmp_path):
    path = write(tmp_path, {"schema": "other/9"})
    with pytest.raises(ValueError):
        load_json(path)
