"""Heat currents, work, interaction current, effective temperatures, COP / efficiency.

Sign conventions: every bath current is positive when energy flows from the
bath into the machine; ``delta_q[i] = r_i - q_i`` (thermal minus actual
excited population); J > 0 means the cooling transition |101> -> |010>
dominates (fridge) or the weight is being lifted (engine).  Heat is measured
against the free Hamiltonian only.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import TruncationError, UndefinedPerformanceError
from .machines import FRIDGE_LOWER, FRIDGE_UPPER, EngineSpec, FridgeSpec
from .solvers import SteadyStateResult, Trajectory
from .states import embed, reduced_state

OFFDIAG_TOL = 1e-8
Q1_FLOOR = 1e-14
BOUNDARY_LIMIT = 1e-3

Spec = FridgeSpec | EngineSpec


@dataclass(frozen=True)
class EffectiveTemperature:
    value: float
    flag: str = "thermal"  # thermal | inverted | zero-temperature | infinite-temperature | non-thermal

    @property
    def is_thermal(self) -> bool:
        return self.flag == "thermal"


@dataclass(frozen=True)
class CurrentsReport:
    machine: str
    Q: tuple[float, ...]
    delta_q: tuple[float, ...]
    J: float
    T_eff: tuple[EffectiveTemperature, ...]
    W: float | None = None
    cop_or_eff: float | None = None


def _qubit_slot(spec: Spec, qubit: int) -> int:
    n_qubits = len(spec.qubits)
    if not 1 <= qubit <= n_qubits:
        what = "the weight has no bath" if isinstance(spec, EngineSpec) and qubit == 3 else "no such qubit"
        raise ValueError(f"qubit {qubit}: {what} (valid: 1..{n_qubits})")
    return qubit - 1


@lru_cache(maxsize=None)
def _excited_mask(slot: int, dims: tuple[int, ...]) -> np.ndarray:
    return np.real(np.diagonal(embed(np.diag([0.0, 1.0]), slot, dims)))


def excited_population(state: np.ndarray, dims: Sequence[int], slot: int) -> float:
    return float(np.real(np.diagonal(state)) @ _excited_mask(slot, tuple(dims)))


def population_shift(state: np.ndarray, spec: Spec, qubit: int, deviation: np.ndarray | None = None) -> float:
    """r_i - q_i.  With ``deviation`` (state minus the thermal product) it is read off exactly."""
    slot = _qubit_slot(spec, qubit)
    if deviation is not None:
        return -excited_population(deviation, spec.dims, slot)
    return spec.qubits[slot].thermal_excited - excited_population(state, spec.dims, slot)


def bath_heat_current(state: np.ndarray, spec: Spec, qubit: int, deviation: np.ndarray | None = None) -> float:
    """Q_i = p_i E_i (r_i - q_i): energy delivered by bath i per unit time."""
    q = spec.qubits[_qubit_slot(spec, qubit)]
    return q.reset_rate * q.energy * population_shift(state, spec, qubit, deviation)


def interaction_current(state: np.ndarray, spec: Spec) -> float:
    g = spec.coupling
    if isinstance(spec, FridgeSpec):
        return 2 * g * float(np.imag(state[FRIDGE_UPPER, FRIDGE_LOWER]))
    n = np.arange(spec.ladder_levels - 1)
    source = spec.index(1, 0, n)
    target = spec.index(0, 1, n + 1)
    return 2 * g * float(np.sum(np.imag(state[source, target])))


def effective_temperature(reduced: np.ndarray, E: float) -> EffectiveTemperature:
    """Temperature whose Gibbs state reproduces the diagonal of a qubit state."""
    if abs(reduced[0, 1]) > OFFDIAG_TOL or abs(reduced[1, 0]) > OFFDIAG_TOL:
        return EffectiveTemperature(math.nan, "non-thermal")
    q0, q1 = float(np.real(reduced[0, 0])), float(np.real(reduced[1, 1]))
    if q1 <= 0:
        return EffectiveTemperature(0.0, "zero-temperature")
    if q0 <= 0:
        return EffectiveTemperature(-0.0, "inverted")
    if q0 == q1:
        return EffectiveTemperature(math.inf, "infinite-temperature")
    T = E / math.log(q0 / q1)
    return EffectiveTemperature(T, "thermal" if T > 0 else "inverted")


def performance(report: CurrentsReport) -> float:
    """Fridge COP Q3/Q1 or engine efficiency W/Q1."""
    Q1 = report.Q[0]
    if abs(Q1) < Q1_FLOOR:
        raise UndefinedPerformanceError(f"machine stalled: |Q1| = {abs(Q1):.3g} < {Q1_FLOOR:g}")
    if report.machine == "fridge":
        return report.Q[2] / Q1
    return report.W / Q1


def _performance_or_none(report: CurrentsReport) -> float | None:
    try:
        return performance(report)
    except UndefinedPerformanceError:
        return None


def current_scale(spec: Spec) -> float:
    """Natural size of a heat current, max(p_i) * max(E_i); used to scale 'zero' tolerances."""
    return max(spec.rates) * max(spec.energies)


def fridge_report(result: SteadyStateResult, spec: FridgeSpec) -> CurrentsReport:
    rho, X = result.state, result.deviation
    Q = tuple(bath_heat_current(rho, spec, i, deviation=X) for i in (1, 2, 3))
    dq = tuple(population_shift(rho, spec, i, deviation=X) for i in (1, 2, 3))
    T_eff = tuple(
        effective_temperature(reduced_state(rho, spec.dims, i), q.energy) for i, q in enumerate(spec.qubits)
    )
    report = CurrentsReport("fridge", Q, dq, interaction_current(rho, spec), T_eff)
    return _with_performance(report)


def _with_performance(report: CurrentsReport) -> CurrentsReport:
    return replace(report, cop_or_eff=_performance_or_none(report))


# engine: time-domain measurements


def weight_distribution(state: np.ndarray, spec: EngineSpec) -> np.ndarray:
    return np.real(np.diagonal(reduced_state(state, spec.dims, 2)))


def mean_level(state: np.ndarray, spec: EngineSpec) -> float:
    pops = weight_distribution(state, spec)
    return float(pops @ np.arange(spec.ladder_levels))


def _window_mask(traj: Trajectory, window: tuple[float, float]) -> np.ndarray:
    t0, t1 = window
    if not (traj.times[0] <= t0 < t1 <= traj.times[-1] * (1 + 1e-12)):
        raise ValueError(f"window {window} is not inside the trajectory span [{traj.times[0]}, {traj.times[-1]}]")
    mask = (traj.times >= t0) & (traj.times <= t1 * (1 + 1e-12))
    if mask.sum() < 3:
        raise ValueError(f"window {window} holds only {mask.sum()} samples; use a finer stride")
    return mask


def boundary_population(state: np.ndarray, spec: EngineSpec) -> float:
    pops = weight_distribution(state, spec)
    return float(pops[0] + pops[-1])


def check_boundary(traj: Trajectory, spec: EngineSpec, mask: np.ndarray) -> float:
    worst = max(boundary_population(s, spec) for s in traj.states[mask])
    if worst >= BOUNDARY_LIMIT:
        raise TruncationError(
            f"truncation contaminated: ladder end levels hold population {worst:.3g} >= {BOUNDARY_LIMIT:g}; "
            "use a larger ladder N or a shorter horizon"
        )
    return worst


def work_current(traj: Trajectory, spec: EngineSpec, window: tuple[float, float]) -> float:
    """E3 times the least-squares slope of <n>(t) over the window."""
    mask = _window_mask(traj, window)
    check_boundary(traj, spec, mask)
    t = traj.times[mask]
    n = np.array([mean_level(s, spec) for s in traj.states[mask]])
    slope = np.polyfit(t - t[0], n, 1)[0]
    return spec.ladder_step * float(slope)


def engine_report(traj: Trajectory, spec: EngineSpec, window: tuple[float, float]) -> CurrentsReport:
    """Window-averaged currents of an engine run."""
    mask = _window_mask(traj, window)
    W = work_current(traj, spec, window)
    states = traj.states[mask]
    Q = tuple(float(np.mean([bath_heat_current(s, spec, i) for s in states])) for i in (1, 2))
    dq = tuple(float(np.mean([population_shift(s, spec, i) for s in states])) for i in (1, 2))
    J = float(np.mean([interaction_current(s, spec) for s in states]))
    mean_state = states.mean(axis=0)
    T_eff = tuple(
        effective_temperature(reduced_state(mean_state, spec.dims, i), q.energy) for i, q in enumerate(spec.qubits)
    )
    return _with_performance(CurrentsReport("engine", Q, dq, J, T_eff, W=W))
