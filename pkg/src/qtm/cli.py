"""Command-line entry point.

    qtm fridge steady|currents|sweep|carnot-check|oracle-check|evolve [flags]
    qtm engine run|carnot-check [flags]
    qtm selftest [--seed N]

Exit codes: 0 success, 1 bad input, 2 a numerical check failed.  Failures
print one ``qtm-error kind=<validation|numerical> reason=<text>`` line on
stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

import numpy as np

from .config import COMMANDS, RunConfig, load_config, parse_grid
from .errors import ConfigError, NumericalCheckError, SpecError
from .io import emit_results
from .liouvillian import assemble_fridge_liouvillian
from .machines import thermal_product
from .observables import excited_population, fridge_report, interaction_current
from .selftest import run_selftest, selftest_payload
from .solvers import default_step, evolve, fridge_steady_state, oracle_crosscheck, steady_state
from .states import trace_distance
from .sweeps import (
    carnot_check_engine,
    carnot_check_fridge,
    oracle_panel,
    reversibility_point_engine,
    run_engine,
    sweep_fridge,
)

log = logging.getLogger("qtm")

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _number_list(text: str):
    vals = _floats(text)
    return vals[0] if len(vals) == 1 else vals


def _common(p: argparse.ArgumentParser, machine: str) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--output", "-o", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int)
    p.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
    p.add_argument("--quiet", "-q", action="store_true", help="suppress informational log lines")
    if machine == "selftest":
        return
    p.add_argument("--E1", type=float)
    p.add_argument("--E2", type=float)
    p.add_argument("--E3", type=float)
    p.add_argument("--T", type=_floats, help="comma-separated bath temperatures, hottest first")
    p.add_argument("--g", type=float, help="interaction strength")
    p.add_argument("--p", type=_number_list, help="reset rate(s), one value or one per qubit")
    p.add_argument("--dt", type=float)
    p.add_argument("--horizon", type=float)
    if machine == "fridge":
        p.add_argument("--axis", help="sweep axis: E1, E3, g, T1..T3, p1..p3")
        p.add_argument("--grid", help="sweep grid, 'lo:hi:n' or comma list")
    else:
        p.add_argument("--N", type=int, help="ladder levels")
        p.add_argument("--n0", type=int, help="initial ladder level")
        p.add_argument("--E3-grid", dest="E3_grid", help="E3 values, 'lo:hi:n' or comma list")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qtm", description="Self-contained quantum thermal machines: reset-model simulator and checks.")
    machines = parser.add_subparsers(dest="machine", required=True, parser_class=_Parser)
    for machine in ("fridge", "engine"):
        mp = machines.add_parser(machine)
        commands = mp.add_subparsers(dest="command", required=True, parser_class=_Parser)
        for command in COMMANDS[machine]:
            _common(commands.add_parser(command), machine)
    _common(machines.add_parser("selftest"), "selftest")
    return parser


_NON_CONFIG = {"machine", "command", "config", "print_config", "quiet"}


def _overrides(args: argparse.Namespace) -> dict:
    out = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG and v is not None}
    for key in ("grid", "E3_grid"):
        if key in out:
            out[key] = parse_grid(out[key])
    return out


def _fail(kind: str, reason: str) -> None:
    reason = " ".join(str(reason).split())
    print(f"qtm-error kind={kind} reason={reason}", file=sys.stderr)


def run(cfg: RunConfig) -> int:
    """Execute a resolved configuration; returns the exit code."""
    p = cfg.params
    if cfg.machine == "selftest":
        results = run_selftest(cfg.seed)
        payload = selftest_payload(cfg.seed, results)
        emit_results(payload, "json", cfg.output)
        failed = [r.name for r in results if not r.passed]
        if failed:
            _fail("numerical", f"selftest suites failed: {','.join(failed)}")
            return EXIT_CHECK
        return EXIT_OK

    if cfg.machine == "fridge":
        spec = cfg.fridge_spec()
        if cfg.command == "steady":
            result = steady_state(assemble_fridge_liouvillian(spec), reference=thermal_product(spec), label=spec.describe())
            emit_results(result, _json_only(cfg), cfg.output, spec)
        elif cfg.command == "currents":
            emit_results(fridge_report(fridge_steady_state(spec), spec), cfg.format, cfg.output, spec)
        elif cfg.command == "sweep":
            if not p["grid"]:
                log.warning("empty sweep grid: writing header only")
            table = sweep_fridge({k: p[k] for k in ("E1", "E3", "T", "p", "g")}, p["axis"], p["grid"])
            emit_results(table, cfg.format, cfg.output, spec if cfg.format == "json" else None)
            if any(not r.ok for r in table.rows):
                log.warning("%d sweep point(s) failed; see status column", sum(not r.ok for r in table.rows))
        elif cfg.command == "carnot-check":
            T1, T2, T3 = p["T"]
            check = carnot_check_fridge(T1, T2, T3, p["E3"], p["g"], p["p"])
            emit_results(check, _json_only(cfg), cfg.output)
            if not check.passed:
                _fail("numerical", "; ".join(check.failures))
                return EXIT_CHECK
        elif cfg.command == "oracle-check":
            reports = [oracle_crosscheck(s, strict=False) for s in oracle_panel(cfg.seed)]
            payload = {
                "kind": "oracle_check",
                "seed": cfg.seed,
                "passed": all(r.passed for r in reports),
                "members": [
                    {"spec": r.spec, "trace_distance": r.trace_distance, "horizon": r.horizon, "steps": r.steps}
                    for r in reports
                ],
            }
            emit_results(payload, _json_only(cfg), cfg.output)
            if not payload["passed"]:
                _fail("numerical", "steady state and long-time evolution disagree")
                return EXIT_CHECK
        elif cfg.command == "evolve":
            emit_results(_fridge_evolution(cfg), _json_only(cfg), cfg.output, spec)
        return EXIT_OK

    spec = cfg.engine_spec()
    if cfg.command == "run":
        report, _ = run_engine(spec, horizon=p["horizon"], dt=p["dt"])
        emit_results(report, cfg.format, cfg.output, spec)
        return EXIT_OK
    T1, T2 = p["T"]
    grid = p["E3_grid"]
    if grid is None:
        star = reversibility_point_engine(T1, T2, p["E2"])
        grid = [f * star for f in (0.1, 0.25, 0.5, 0.75)]
        log.info("default applied: E3_grid = %r", grid)
    check, table = carnot_check_engine(T1, T2, p["E2"], grid, p["g"], p["p"], N=p["N"], n0=p["n0"], horizon=p["horizon"])
    emit_results((check, table), cfg.format, cfg.output)
    if not check.passed:
        _fail("numerical", "; ".join(check.failures))
        return EXIT_CHECK
    return EXIT_OK


def _json_only(cfg: RunConfig) -> str:
    if cfg.format != "json":
        raise ConfigError(f"{cfg.machine} {cfg.command} writes JSON only; got --format {cfg.format}")
    return "json"


def _fridge_evolution(cfg: RunConfig) -> dict:
    spec = cfg.fridge_spec()
    L = assemble_fridge_liouvillian(spec, frame="rotating")
    horizon = cfg.params["horizon"] or 200.0 / min(spec.rates)
    dt = cfg.params["dt"] or default_step(L, spec.rates + (spec.coupling,))
    n_steps = int(np.ceil(horizon / dt - 1e-9))
    traj = evolve(L, thermal_product(spec), horizon, dt, stride=max(1, n_steps // 100))
    target = fridge_steady_state(spec).state
    return {
        "kind": "trajectory",
        "frame": "rotating",
        "step_size": traj.step_size,
        "times": list(traj.times),
        "excited_populations": [[excited_population(s, spec.dims, i) for i in range(3)] for s in traj.states],
        "J": [interaction_current(s, spec) for s in traj.states],
        "trace_distance_to_steady_state": [trace_distance(s, target) for s in traj.states],
    }


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _fail("validation", str(exc).splitlines()[0])
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="qtm: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        command = "selftest" if args.machine == "selftest" else args.command
        cfg = load_config(args.config, args.machine, command, _overrides(args))
        if args.print_config:
            json.dump(cfg.resolved(), sys.stdout, indent=2)
            sys.stdout.write("\n")
            return EXIT_OK
        return run(cfg)
    except (ConfigError, SpecError, ValueError) as exc:
        _fail("validation", str(exc))
        return EXIT_INPUT
    except NumericalCheckError as exc:
        _fail("numerical", str(exc))
        return EXIT_CHECK
    except OSError as exc:
        _fail("io", str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
