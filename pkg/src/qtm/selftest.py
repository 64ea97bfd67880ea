"""Seeded self-test: oracle panel plus the identity / invariant suites.

Each suite yields a :class:`SuiteResult` holding the worst observed metric
and the tolerance it was judged against.  The report contains no timings or
other run-dependent data, so identical seeds give byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liouvillian import reset_dissipator
from .machines import thermal_product, thermal_qubit_state
from .observables import fridge_report
from .solvers import evolve, fridge_steady_state, oracle_crosscheck
from .states import trace_distance
from .sweeps import (
    carnot_check_fridge,
    engine_spec,
    oracle_panel,
    q3_zero_crossing,
    random_fridge_specs,
    reversibility_point_engine,
    run_engine,
    working_margin,
)

PANEL_SIZE = 100


@dataclass(frozen=True)
class SuiteResult:
    name: str
    metric: float
    tolerance: float
    passed: bool
    detail: str = ""


def _rel_spread(values) -> float:
    v = np.asarray(values, dtype=float)
    scale = np.max(np.abs(v))
    return 0.0 if scale == 0 else float(np.ptp(v) / scale)


def suite_oracle(seed: int) -> list[SuiteResult]:
    panel = oracle_panel(seed)
    random_members, analytic = panel[:-2], panel[-2:]
    worst = max(oracle_crosscheck(s, strict=False).trace_distance for s in random_members)
    out = [SuiteResult("oracle_random_panel", worst, 1e-5, worst <= 1e-5, f"{len(random_members)} specs")]
    for name, spec in zip(("oracle_g0", "oracle_equal_T"), analytic):
        d_evolve = oracle_crosscheck(spec, strict=False).trace_distance
        d_exact = trace_distance(fridge_steady_state(spec).state, thermal_product(spec))
        worst = max(d_evolve, d_exact)
        out.append(SuiteResult(name, worst, 1e-10, worst <= 1e-10))
    return out


def suite_fridge_identities(seed: int, n: int = PANEL_SIZE) -> list[SuiteResult]:
    ratio = reset = conservation = 0.0
    sign_mismatch = signs_bad = cop_dev = teff_bad = 0
    working = 0
    for spec in random_fridge_specs(seed, n):
        rep = fridge_report(fridge_steady_state(spec), spec)
        (E1, E2, E3), p = spec.energies, spec.rates
        Q1, Q2, Q3 = rep.Q
        ratio = max(ratio, _rel_spread([Q1 / E1, -Q2 / E2, Q3 / E3, rep.J]))
        reset = max(reset, _rel_spread([abs(pi * dq) for pi, dq in zip(p, rep.delta_q)]))
        conservation = max(conservation, abs(Q1 + Q2 + Q3) / max(abs(q) for q in rep.Q))
        s1, s2, s3 = np.sign(rep.delta_q)
        if not (s1 == s3 == -s2):
            signs_bad += 1
        margin = working_margin(spec)
        if np.sign(Q3) != np.sign(margin):
            sign_mismatch += 1
        if Q1 > 0:
            cop_dev = max(cop_dev, abs(rep.cop_or_eff - E3 / E1) / (E3 / E1))
        if margin > 0:
            working += 1
            T1, T2, T3 = spec.temperatures
            t1, t2, t3 = (t.value for t in rep.T_eff)
            if not (t3 < T3 and t2 > T2 and t1 < T1):
                teff_bad += 1
    return [
        SuiteResult("ratio_identity", ratio, 1e-9, ratio <= 1e-9, f"{n} specs"),
        SuiteResult("reset_identity", reset, 1e-9, reset <= 1e-9 and signs_bad == 0, f"sign-pattern violations: {signs_bad}"),
        SuiteResult("energy_conservation", conservation, 1e-10, conservation <= 1e-10),
        SuiteResult("working_regime_sign_law", float(sign_mismatch), 0.0, sign_mismatch == 0),
        SuiteResult("cop_law", cop_dev, 1e-9, cop_dev <= 1e-9),
        SuiteResult("effective_temperatures", float(teff_bad), 0.0, teff_bad == 0, f"{working} working-regime specs"),
    ]


def suite_boundary_and_carnot() -> list[SuiteResult]:
    template = {"E1": 0.5, "E3": 1.0, "T": (10.0, 5.0, 4.0), "p": 1e-3, "g": 1e-2}
    zero = q3_zero_crossing(template, "E1", 0.45, 0.55)
    check = carnot_check_fridge(10.0, 5.0, 4.0, 1.0, 1e-3, 1e-3)
    rel = abs(check.difference) / check.carnot_performance
    return [
        SuiteResult("q3_zero_at_reversibility", abs(zero - 0.5), 1e-6, abs(zero - 0.5) <= 1e-6),
        SuiteResult("carnot_cop_fridge", rel, 1e-9, check.passed, "; ".join(check.failures)),
    ]


def suite_dynamics() -> list[SuiteResult]:
    p, E, T = 0.5, 1.0, 2.0
    tau = thermal_qubit_state(E, T)
    r = float(tau[1, 1].real)
    L = reset_dissipator(0, tau, p, (2,))
    rho0 = np.diag([0.0, 1.0]).astype(complex)
    t_end = 5 / p
    traj = evolve(L, rho0, t_end, dt=1e-3 / p, stride=500)
    exact = r + (1 - r) * np.exp(-p * traj.times)
    err = float(np.max(np.abs(traj.states[:, 1, 1].real - exact)))
    return [SuiteResult("rk4_single_qubit_relaxation", err, 1e-9, err <= 1e-9)]


def suite_engine() -> list[SuiteResult]:
    T1, T2, E2, g, p = 10.0, 5.0, 1.0, 0.005, 0.01
    spec = engine_spec(T1, T2, E2, 0.5, g, p)
    rep, _ = run_engine(spec)
    E1, _, E3 = spec.energies
    Q1, Q2 = rep.Q
    ratio = max(abs(Q1 / E1 - rep.W / E3), abs(-Q2 / E2 - rep.W / E3)) / (rep.W / E3)
    eta_dev = abs(rep.cop_or_eff - E3 / E1) / (E3 / E1)
    star = engine_spec(T1, T2, E2, reversibility_point_engine(T1, T2, E2), g, p)
    rep_star, _ = run_engine(star)
    floor = 1e-12 * star.ladder_step * p
    return [
        SuiteResult("engine_current_ratios", ratio, 0.02, ratio <= 0.02 and rep.W > 0),
        SuiteResult("engine_efficiency", eta_dev, 0.02, eta_dev <= 0.02),
        SuiteResult("engine_stall_at_reversibility", abs(rep_star.W), floor, abs(rep_star.W) <= floor),
    ]


def run_selftest(seed: int = 42) -> list[SuiteResult]:
    results = []
    results += suite_oracle(seed)
    results += suite_fridge_identities(seed)
    results += suite_boundary_and_carnot()
    results += suite_dynamics()
    results += suite_engine()
    return results


def selftest_payload(seed: int, results: list[SuiteResult]) -> dict:
    return {
        "kind": "selftest",
        "seed": seed,
        "passed": all(r.passed for r in results),
        "suites": [
            {"name": r.name, "passed": r.passed, "metric": r.metric, "tolerance": r.tolerance, "detail": r.detail}
            for r in results
        ],
    }
