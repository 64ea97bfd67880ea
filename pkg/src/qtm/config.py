"""Run configuration: one defaults table, strict JSON config files, flag overrides."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, SpecError
from .machines import EngineSpec, FridgeSpec

log = logging.getLogger("qtm")

MACHINES = ("fridge", "engine", "selftest")
COMMANDS = {
    "fridge": ("steady", "evolve", "currents", "sweep", "carnot-check", "oracle-check"),
    "engine": ("run", "carnot-check"),
    "selftest": ("selftest",),
}
FORMATS = ("csv", "json")

# Every numeric default lives here.  None means "derived at run time":
# dt -> min(0.01/|L|, 0.05/max(p, g)) for the fridge, 0.1/|L| for the engine;
# horizon -> 200/min(p) (fridge evolve) or 80/min(p) (engine);
# n0 -> N // 2; E3_grid -> (0.1, 0.25, 0.5, 0.75) * E3*.
DEFAULTS: dict[str, dict[str, Any]] = {
    "fridge": {
        "E1": 1.0,
        "E3": 1.0,
        "T": [10.0, 5.0, 4.0],
        "g": 0.01,
        "p": [1e-3, 1e-3, 1e-3],
        "dt": None,
        "horizon": None,
        "axis": "E1",
        "grid": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        "seed": 42,
    },
    "engine": {
        "E2": 1.0,
        "E3": 0.5,
        "T": [10.0, 5.0],
        "g": 0.005,
        "p": [0.01, 0.01],
        "N": 41,
        "n0": None,
        "dt": None,
        "horizon": None,
        "E3_grid": None,
        "seed": 42,
    },
    "selftest": {"seed": 42},
}

SPEC_KEYS = {
    "fridge": ("E1", "E2", "E3", "T", "g", "p"),
    "engine": ("E1", "E2", "E3", "T", "g", "p", "N", "n0"),
    "selftest": (),
}
COMMON_KEYS = ("machine", "command", "output", "format", "seed", "dt", "horizon")
EXTRA_KEYS = {"fridge": ("axis", "grid"), "engine": ("E3_grid",), "selftest": ()}


def allowed_keys(machine: str) -> set[str]:
    return set(COMMON_KEYS) | set(SPEC_KEYS[machine]) | set(EXTRA_KEYS[machine])


@dataclass
class RunConfig:
    machine: str
    command: str
    params: dict[str, Any] = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    seed: int = 42

    def fridge_spec(self) -> FridgeSpec:
        p = self.params
        return FridgeSpec.build(p["E1"], p["E3"], p["T"], p["p"], p["g"])

    def engine_spec(self) -> EngineSpec:
        p = self.params
        return EngineSpec.build(p["E2"], p["E3"], p["T"], p["p"], p["g"], N=p["N"], n0=p["n0"])

    def resolved(self) -> dict[str, Any]:
        out = asdict(self)
        if self.machine == "fridge":
            out["params"]["E2"] = self.fridge_spec().qubit2.energy
        elif self.machine == "engine":
            out["params"]["E1"] = self.engine_spec().qubit1.energy
        return out


def read_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: parse error: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def parse_grid(text: str) -> list[float]:
    """'lo:hi:n' (inclusive linspace) or a comma-separated list; '' is the empty grid."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r}: expected lo:hi:n")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        return [float(x) for x in np.linspace(lo, hi, n)]
    return [float(x) for x in text.split(",")]


def _number(key: str, value: Any, integer: bool = False) -> float | int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"key {key!r}: expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"key {key!r}: expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"key {key!r}: expected a finite number, got {value!r}")
    return float(value)


def _numbers(key: str, value: Any, length: int | None) -> list[float]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value] * (length or 1)
    if not isinstance(value, list):
        raise ConfigError(f"key {key!r}: expected a list of numbers, got {value!r}")
    out = [_number(key, v) for v in value]
    if length is not None and len(out) != length:
        raise ConfigError(f"key {key!r}: expected {length} values, got {len(out)}")
    return out


def _coerce(machine: str, key: str, value: Any) -> Any:
    if value is None:
        return None
    n_qubits = 3 if machine == "fridge" else 2
    if key in ("T",):
        if not isinstance(value, list):
            raise ConfigError(f"key 'T': expected a list of {n_qubits} temperatures, got {value!r}")
        return _numbers(key, value, n_qubits)
    if key == "p":
        return _numbers(key, value, n_qubits)
    if key in ("grid", "E3_grid"):
        if isinstance(value, str):
            return parse_grid(value)
        return _numbers(key, value, None)
    if key in ("N", "n0", "seed"):
        return _number(key, value, integer=True)
    if key in ("axis", "output", "format", "machine", "command"):
        if not isinstance(value, str):
            raise ConfigError(f"key {key!r}: expected a string, got {value!r}")
        return value
    return _number(key, value)


def load_config(
    path: str | Path | None = None,
    machine: str | None = None,
    command: str | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Merge file values, flag overrides (winning) and defaults into a validated RunConfig."""
    file_values = read_config_file(path) if path is not None else {}
    machine = machine or file_values.get("machine")
    if machine not in MACHINES:
        raise ConfigError(f"machine must be one of {MACHINES}, got {machine!r}")
    command = command or file_values.get("command") or (machine if machine == "selftest" else None)
    if command not in COMMANDS[machine]:
        raise ConfigError(f"command for {machine} must be one of {COMMANDS[machine]}, got {command!r}")
    for source, values in (("config", file_values), ("flags", overrides or {})):
        unknown = sorted(set(values) - allowed_keys(machine))
        if unknown:
            raise ConfigError(f"{source}: unknown key(s) {unknown} for machine {machine!r}")
    for key in ("machine", "command"):
        if key in file_values and file_values[key] != {"machine": machine, "command": command}[key]:
            raise ConfigError(f"config key {key!r}={file_values[key]!r} conflicts with command line {machine} {command}")

    merged = {k: _coerce(machine, k, v) for k, v in file_values.items() if k not in ("machine", "command")}
    for k, v in (overrides or {}).items():
        if v is not None:
            merged[k] = _coerce(machine, k, v)

    for key, default in DEFAULTS[machine].items():
        if key not in merged:
            merged[key] = default
            log.info("default applied: %s = %r", key, default)

    fmt = merged.pop("format", None)
    if fmt is None:
        fmt = "csv" if command == "sweep" else "json"
        log.info("default applied: format = %r", fmt)
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")
    output = merged.pop("output", None)
    seed = merged.pop("seed")

    cfg = RunConfig(machine, command, merged, output, fmt, seed)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    p = cfg.params
    try:
        if cfg.machine == "fridge":
            if p.get("E2") is not None:
                if p["E2"] != p["E1"] + p["E3"]:
                    raise ConfigError(
                        f"E2 = {p['E2']!r} rejected: the fridge requires E2 = E1 + E3 = {p['E1'] + p['E3']!r} "
                        "(|010> and |101> degenerate); omit E2, it is derived"
                    )
            p.pop("E2", None)
            spec = cfg.fridge_spec()
            log.info("derived: E2 = E1 + E3 = %r", spec.qubit2.energy)
            if p["axis"] not in ("E1", "E3", "g", "T1", "T2", "T3", "p1", "p2", "p3"):
                raise ConfigError(f"unknown sweep axis {p['axis']!r}")
        elif cfg.machine == "engine":
            if p.get("E1") is not None:
                if p["E1"] != p["E2"] + p["E3"]:
                    raise ConfigError(
                        f"E1 = {p['E1']!r} rejected: the engine requires E1 = E2 + E3 = {p['E2'] + p['E3']!r}; "
                        "omit E1, it is derived"
                    )
            p.pop("E1", None)
            spec = cfg.engine_spec()
            if p["n0"] is None:
                p["n0"] = spec.initial_level
                log.info("derived: n0 = N // 2 = %d", spec.initial_level)
            log.info("derived: E1 = E2 + E3 = %r", spec.qubit1.energy)
    except SpecError as exc:
        raise ConfigError(str(exc)) from exc
    for key in ("dt", "horizon"):
        if p.get(key) is not None and not p[key] > 0:
            raise ConfigError(f"key {key!r} must be > 0, got {p[key]!r}")
