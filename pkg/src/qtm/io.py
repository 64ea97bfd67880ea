"""CSV / JSON serialization of results.

JSON objects carry ``"schema": "qtm/1"`` and a ``"kind"`` tag.  Floats are
written with ``repr`` (shortest round-trip form) in both formats, density
matrices as row-major nested lists of ``[re, im]`` pairs.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .machines import EngineSpec, FridgeSpec
from .observables import CurrentsReport
from .solvers import SteadyStateResult
from .sweeps import CSV_COLUMNS, CarnotCheck, SweepRow, SweepTable

SCHEMA = "qtm/1"


def fmt_real(x: float | None) -> str:
    if x is None:
        return ""
    return repr(float(x))


def matrix_to_pairs(rho: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(rho)]


def pairs_to_matrix(pairs: list) -> np.ndarray:
    arr = np.array(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def spec_to_dict(spec: FridgeSpec | EngineSpec) -> dict:
    d = {
        "E": list(spec.energies),
        "T": list(spec.temperatures),
        "p": list(spec.rates),
        "g": spec.coupling,
    }
    if isinstance(spec, EngineSpec):
        d.update(N=spec.ladder_levels, n0=spec.initial_level)
    return d


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, list):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def report_to_dict(report: CurrentsReport) -> dict:
    return {
        "machine": report.machine,
        "Q": list(report.Q),
        "W": report.W,
        "J": report.J,
        "delta_q": list(report.delta_q),
        "T_eff": [{"value": t.value, "flag": t.flag} for t in report.T_eff],
        "cop_or_eff": report.cop_or_eff,
    }


def sweep_to_dict(table: SweepTable) -> dict:
    return {
        "machine": table.machine,
        "axis": table.axis,
        "values": list(table.values),
        "template": _plain(table.template),
        "columns": list(CSV_COLUMNS),
        "rows": [r.as_dict() for r in table.rows],
    }


def carnot_to_dict(check: CarnotCheck) -> dict:
    return {
        "machine": check.machine,
        "reversibility_value": check.reversibility_value,
        "limit_performance": check.limit_performance,
        "carnot_performance": check.carnot_performance,
        "difference": check.difference,
        "current_at_point": check.current_at_point,
        "current_scale": check.current_scale,
        "passed": check.passed,
        "failures": list(check.failures),
    }


def to_payload(result: Any, spec: FridgeSpec | EngineSpec | None = None) -> dict:
    if isinstance(result, SteadyStateResult):
        body = {
            "kind": "steady_state",
            "residual": result.residual,
            "gap_proxy": result.gap_proxy,
            "method": result.method,
            "state": matrix_to_pairs(result.state),
        }
    elif isinstance(result, CurrentsReport):
        body = {"kind": "currents", **report_to_dict(result)}
    elif isinstance(result, SweepTable):
        body = {"kind": "sweep", **sweep_to_dict(result)}
    elif isinstance(result, CarnotCheck):
        body = {"kind": "carnot_check", **carnot_to_dict(result)}
    elif isinstance(result, tuple) and len(result) == 2 and isinstance(result[0], CarnotCheck):
        body = {"kind": "carnot_check", **carnot_to_dict(result[0]), "sweep": sweep_to_dict(result[1])}
    elif isinstance(result, dict):
        body = dict(result)
    elif is_dataclass(result):
        body = asdict(result)
    else:
        raise TypeError(f"cannot serialize {type(result).__name__}")
    payload = {"schema": SCHEMA}
    if spec is not None:
        payload["spec"] = spec_to_dict(spec)
    payload.update(body)
    return _plain(payload)


def to_json(result: Any, spec=None) -> str:
    return json.dumps(to_payload(result, spec), indent=2) + "\n"


def _rows_for_csv(result: Any) -> list[SweepRow]:
    if isinstance(result, SweepTable):
        return list(result.rows)
    if isinstance(result, tuple) and len(result) == 2 and isinstance(result[1], SweepTable):
        return list(result[1].rows)
    if isinstance(result, CurrentsReport):
        return [SweepRow.from_report(None, result)]
    raise TypeError(f"CSV output is available for currents and sweeps, not {type(result).__name__}")


def to_csv(result: Any) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in _rows_for_csv(result):
        d = row.as_dict()
        writer.writerow([d["status"] if c == "status" else fmt_real(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def emit_results(result: Any, fmt: str = "json", path: str | Path | None = None, spec=None) -> str:
    """Serialize ``result`` and write it to ``path`` (stdout when None); returns the text."""
    if fmt == "json":
        text = to_json(result, spec)
    elif fmt == "csv":
        text = to_csv(result)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def load_json(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text())
    if data.get("schema") != SCHEMA:
        raise ValueError(f"{path}: expected schema {SCHEMA!r}, got {data.get('schema')!r}")
    return data
