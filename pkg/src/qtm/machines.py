"""Machine parameterizations and their Hamiltonians.

Conventions used everywhere in the package:

* natural units, k_B = hbar = 1;
* each qubit has ground state at index 0 and excited state at index 1;
* fridge basis is ``|q1 q2 q3>`` with q1 the most significant bit, so the
  flat index is ``4*q1 + 2*q2 + q3``;
* engine basis is ``|q1 q2> (x) |n>_weight`` with flat index
  ``(2*q1 + q2) * N + n``.

The degeneracy constraints (E2 = E1 + E3 for the fridge, E1 = E2 + E3 for
the engine) are structural, so the derived gap is computed by the builders
and re-checked exactly by the dataclasses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import SpecError

FRIDGE_DIMS = (2, 2, 2)
# |010> and |101>
FRIDGE_LOWER = 0b010
FRIDGE_UPPER = 0b101

HERMITIAN_ATOL = 1e-12


@dataclass(frozen=True)
class QubitSpec:
    energy: float
    temperature: float
    reset_rate: float

    def __post_init__(self):
        for name in ("energy", "temperature", "reset_rate"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise SpecError(f"qubit {name} must be finite and > 0, got {value!r}")

    @property
    def thermal_excited(self) -> float:
        return thermal_excited_population(self.energy, self.temperature)

    def thermal_state(self) -> np.ndarray:
        return thermal_qubit_state(self.energy, self.temperature)


def _check_coupling(g: float) -> None:
    # g = 0 is allowed: it is the uncoupled reference machine used by the oracles
    if not np.isfinite(g) or g < 0:
        raise SpecError(f"coupling g must be finite and >= 0, got {g!r}")


@dataclass(frozen=True)
class FridgeSpec:
    """Three-qubit absorption refrigerator: hot (1), room (2), cold (3)."""

    qubit1: QubitSpec
    qubit2: QubitSpec
    qubit3: QubitSpec
    coupling: float

    def __post_init__(self):
        _check_coupling(self.coupling)
        E1, E2, E3 = self.energies
        if E2 != E1 + E3:
            raise SpecError(f"requires E2 = E1 + E3 (degenerate |010>,|101>); got E2={E2!r}, E1+E3={E1 + E3!r}")
        T1, T2, T3 = self.temperatures
        # the all-equal case is the equilibrium reference, every other tie is rejected
        if not (T1 > T2 > T3 or T1 == T2 == T3):
            raise SpecError(f"requires T1 > T2 > T3; got T=({T1!r}, {T2!r}, {T3!r})")

    @classmethod
    def build(cls, E1: float, E3: float, T: Sequence[float], p: float | Sequence[float], g: float) -> "FridgeSpec":
        """Build from the free gaps E1, E3; E2 is derived as E1 + E3."""
        T1, T2, T3 = _triple(T, "T")
        p1, p2, p3 = _triple(p, "p")
        return cls(
            QubitSpec(float(E1), T1, p1),
            QubitSpec(float(E1) + float(E3), T2, p2),
            QubitSpec(float(E3), T3, p3),
            float(g),
        )

    @property
    def qubits(self) -> tuple[QubitSpec, QubitSpec, QubitSpec]:
        return (self.qubit1, self.qubit2, self.qubit3)

    @property
    def energies(self) -> tuple[float, float, float]:
        return tuple(q.energy for q in self.qubits)

    @property
    def temperatures(self) -> tuple[float, float, float]:
        return tuple(q.temperature for q in self.qubits)

    @property
    def rates(self) -> tuple[float, float, float]:
        return tuple(q.reset_rate for q in self.qubits)

    @property
    def dims(self) -> tuple[int, int, int]:
        return FRIDGE_DIMS

    def describe(self) -> str:
        E1, E2, E3 = self.energies
        return f"FridgeSpec(E=({E1!r}, {E2!r}, {E3!r}), T={self.temperatures!r}, p={self.rates!r}, g={self.coupling!r})"


@dataclass(frozen=True)
class EngineSpec:
    """Two qubits (hot 1, cold 2) lifting a weight on an N-level ladder of step E3."""

    qubit1: QubitSpec
    qubit2: QubitSpec
    ladder_step: float
    coupling: float
    ladder_levels: int = 41
    initial_level: int = 20

    def __post_init__(self):
        _check_coupling(self.coupling)
        if not np.isfinite(self.ladder_step) or self.ladder_step <= 0:
            raise SpecError(f"ladder step E3 must be > 0, got {self.ladder_step!r}")
        E1, E2, E3 = self.qubit1.energy, self.qubit2.energy, self.ladder_step
        if E1 != E2 + E3:
            raise SpecError(f"requires E1 = E2 + E3 (degenerate |10,n>,|01,n+1>); got E1={E1!r}, E2+E3={E2 + E3!r}")
        if not self.qubit1.temperature > self.qubit2.temperature:
            raise SpecError(f"requires T1 > T2; got T=({self.qubit1.temperature!r}, {self.qubit2.temperature!r})")
        N, n0 = self.ladder_levels, self.initial_level
        if int(N) != N or N < 3:
            raise SpecError(f"ladder needs N >= 3 levels, got {N!r}")
        if int(n0) != n0 or not 0 < n0 < N - 1:
            raise SpecError(f"initial level must satisfy 0 < n0 < N-1, got n0={n0!r} with N={N!r}")

    @classmethod
    def build(
        cls,
        E2: float,
        E3: float,
        T: Sequence[float],
        p: float | Sequence[float],
        g: float,
        N: int = 41,
        n0: int | None = None,
    ) -> "EngineSpec":
        """Build from the cold gap E2 and ladder step E3; E1 is derived as E2 + E3."""
        T1, T2 = _pair(T, "T")
        p1, p2 = _pair(p, "p")
        if n0 is None:
            n0 = N // 2
        return cls(
            QubitSpec(float(E2) + float(E3), T1, p1),
            QubitSpec(float(E2), T2, p2),
            float(E3),
            float(g),
            int(N),
            int(n0),
        )

    @property
    def qubits(self) -> tuple[QubitSpec, QubitSpec]:
        return (self.qubit1, self.qubit2)

    @property
    def energies(self) -> tuple[float, float, float]:
        return (self.qubit1.energy, self.qubit2.energy, self.ladder_step)

    @property
    def temperatures(self) -> tuple[float, float]:
        return (self.qubit1.temperature, self.qubit2.temperature)

    @property
    def rates(self) -> tuple[float, float]:
        return (self.qubit1.reset_rate, self.qubit2.reset_rate)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (2, 2, self.ladder_levels)

    def index(self, q1: int, q2: int, n: int) -> int:
        return (2 * q1 + q2) * self.ladder_levels + n

    def describe(self) -> str:
        return (
            f"EngineSpec(E=({self.qubit1.energy!r}, {self.qubit2.energy!r}, {self.ladder_step!r}), "
            f"T={self.temperatures!r}, p={self.rates!r}, g={self.coupling!r}, "
            f"N={self.ladder_levels}, n0={self.initial_level})"
        )


def _triple(value, name):
    if np.ndim(value) == 0:
        return (float(value),) * 3
    vals = tuple(float(v) for v in value)
    if len(vals) != 3:
        raise SpecError(f"{name} needs 3 values, got {len(vals)}")
    return vals


def _pair(value, name):
    if np.ndim(value) == 0:
        return (float(value),) * 2
    vals = tuple(float(v) for v in value)
    if len(vals) != 2:
        raise SpecError(f"{name} needs 2 values, got {len(vals)}")
    return vals


def thermal_excited_population(E: float, T: float) -> float:
    """Gibbs weight of the excited level, e^{-E/T} / (1 + e^{-E/T})."""
    if not (E > 0 and T > 0):
        raise SpecError(f"thermal state needs E > 0 and T > 0, got E={E!r}, T={T!r}")
    return float(expit(-E / T))


def thermal_qubit_state(E: float, T: float) -> np.ndarray:
    r = thermal_excited_population(E, T)
    # 1 - r rather than expit(E/T): the two entries then sum to exactly 1.0
    return np.diag([1.0 - r, r]).astype(complex)


def is_hermitian(H: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    return bool(np.max(np.abs(H - H.conj().T), initial=0.0) <= atol)


def build_free_hamiltonian_fridge(spec: FridgeSpec) -> np.ndarray:
    E = spec.energies
    diag = np.zeros(8)
    for k in range(8):
        bits = ((k >> 2) & 1, (k >> 1) & 1, k & 1)
        # summed left to right so |010> and |101> give bit-identical E2 and E1 + E3
        diag[k] = sum(E[i] for i in range(3) if bits[i])
    return np.diag(diag).astype(complex)


def build_interaction_fridge(g: float) -> np.ndarray:
    H = np.zeros((8, 8), dtype=complex)
    H[FRIDGE_LOWER, FRIDGE_UPPER] = g
    H[FRIDGE_UPPER, FRIDGE_LOWER] = g
    return H


def build_hamiltonians_engine(spec: EngineSpec) -> tuple[np.ndarray, np.ndarray]:
    """Free and interaction Hamiltonians of the engine, each (4N) x (4N).

    The ladder is hard-truncated: ``|10,N-1>`` has no partner above it and
    ``|01,0>`` none below.
    """
    N = spec.ladder_levels
    E1, E2, E3 = spec.energies
    n = np.arange(N)
    diag = np.concatenate([E3 * n, E2 + E3 * n, E1 + E3 * n, E1 + E2 + E3 * n])
    H0 = np.diag(diag).astype(complex)
    Hint = np.zeros((4 * N, 4 * N), dtype=complex)
    lower = spec.index(1, 0, n[:-1])
    upper = spec.index(0, 1, n[1:])
    Hint[lower, upper] = spec.coupling
    Hint[upper, lower] = spec.coupling
    return H0, Hint


def fridge_hamiltonian(spec: FridgeSpec) -> np.ndarray:
    return build_free_hamiltonian_fridge(spec) + build_interaction_fridge(spec.coupling)


def thermal_product(spec: FridgeSpec | EngineSpec) -> np.ndarray:
    """tau_1 (x) tau_2 (x) tau_3 for the fridge; tau_1 (x) tau_2 (x) |n0><n0| for the engine."""
    from functools import reduce

    factors = [q.thermal_state() for q in spec.qubits]
    if isinstance(spec, EngineSpec):
        weight = np.zeros((spec.ladder_levels, spec.ladder_levels), dtype=complex)
        weight[spec.initial_level, spec.initial_level] = 1.0
        factors.append(weight)
    return reduce(np.kron, factors)
