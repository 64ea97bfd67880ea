"""Steady states by linear solve, transient dynamics by fixed-step RK4.

The two routes are deliberately independent: :func:`oracle_crosscheck`
solves the lab-frame generator directly and integrates the rotating-frame
generator for a long time, then compares the results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSteadyStateError, IntegrationError, NumericalCheckError
from .liouvillian import Superoperator, assemble_fridge_liouvillian, coherent_generator
from .machines import FridgeSpec, build_interaction_fridge, thermal_product
from .states import (
    check_density_matrix,
    density_matrix_defects,
    hermitian_part,
    trace_distance,
    unvec,
    vec,
)

GAP_RTOL = 1e-10
RESIDUAL_RTOL = 1e-10
COND_LIMIT = 1e12
STEP_GUARD = 0.1
TRACE_DRIFT_PER_STEP = 1e-8
HORIZON_FACTOR = 200.0
ORACLE_TOL = 1e-5


@dataclass(frozen=True, eq=False)
class SteadyStateResult:
    state: np.ndarray
    residual: float
    gap_proxy: float
    # state - reference, solved for directly; populations shifts are read from it
    deviation: np.ndarray
    reference: np.ndarray
    method: str
    norm: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    step_size: float
    dims: tuple[int, ...]

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def steady_state(
    L: Superoperator,
    reference: np.ndarray | None = None,
    forcing: np.ndarray | None = None,
    label: str | None = None,
) -> SteadyStateResult:
    """Unique stationary state of ``L``.

    Solves ``L X = -L(reference)`` with ``Tr X = 0`` (one equation of the
    rank-deficient system replaced by the trace row), so the deviation from a
    nearby reference state comes out with full relative precision.  Falls back
    to the SVD null vector when the bordered system is ill-conditioned.

    ``forcing`` may supply ``L(reference)`` when the caller knows terms that
    vanish on it exactly; evaluating them numerically would leave an eps-sized
    source behind.
    """
    M = L.dense()
    d = L.d
    sv = np.linalg.svd(M, compute_uv=False)
    norm = float(sv[0])
    gap = float(sv[-2]) if sv.size > 1 else norm
    if gap < GAP_RTOL * norm:
        raise DegenerateSteadyStateError(
            f"steady state is not unique (second-smallest singular value {gap:.3g}, |L|={norm:.3g})"
            + (f" for {label}" if label else "")
        )
    ref = np.eye(d, dtype=complex) / d if reference is None else np.asarray(reference, dtype=complex)
    A = M.copy()
    A[0, :] = vec(np.eye(d))
    if np.linalg.cond(A) <= COND_LIMIT:
        f = L.apply(ref) if forcing is None else np.asarray(forcing, dtype=complex)
        X = unvec(_refined_solve(A, f), d)
        method = "trace-row"
    else:
        _, _, vh = np.linalg.svd(M)
        rho = unvec(vh[-1].conj(), d)
        rho = rho / np.trace(rho)
        X = rho - ref
        method = "svd"
    X = hermitian_part(X)
    state = ref + X
    residual = float(np.linalg.norm(M @ vec(state)))
    if residual > RESIDUAL_RTOL * norm:
        raise NumericalCheckError(f"steady-state residual {residual:.3g} exceeds {RESIDUAL_RTOL:g} * |L|")
    defects = density_matrix_defects(state)
    if defects:
        raise NumericalCheckError("steady state is not a density matrix: " + "; ".join(defects))
    return SteadyStateResult(state, residual, gap, X, ref, method, norm)


def _refined_solve(A: np.ndarray, forcing: np.ndarray, sweeps: int = 2) -> np.ndarray:
    """Solve the bordered system with residuals accumulated in extended precision.

    Shifts of individual populations can sit several decades below the norm
    of the deviation (very unequal reset rates); plain LU leaves them with
    relative errors around cond(A) * eps * |X| / |shift|.
    """
    A_ext = A.astype(np.clongdouble)
    b_ext = -vec(forcing).astype(np.clongdouble)
    b_ext[0] = 0
    x = np.linalg.solve(A, b_ext.astype(complex)).astype(np.clongdouble)
    for _ in range(sweeps):
        r = b_ext - A_ext @ x
        x = x + np.linalg.solve(A, r.astype(complex))
    return x.astype(complex)


def fridge_steady_state(spec: FridgeSpec, frame: str = "rotating") -> SteadyStateResult:
    """Steady state of the fridge as a deviation from tau_1 (x) tau_2 (x) tau_3.

    Every reset channel fixes the thermal product and so does the free
    Hamiltonian, so only the interaction term drives the deviation.
    """
    ref = thermal_product(spec)
    L = assemble_fridge_liouvillian(spec, frame=frame)
    forcing = coherent_generator(build_interaction_fridge(spec.coupling), spec.dims).apply(ref)
    return steady_state(L, reference=ref, forcing=forcing, label=spec.describe())


def max_stable_step(L: Superoperator) -> float:
    n = L.norm2()
    return math.inf if n == 0 else STEP_GUARD / n


def default_step(L: Superoperator, rates) -> float:
    n = L.norm2()
    fast = max(rates)
    candidates = [0.01 / n if n > 0 else math.inf, 0.05 / fast if fast > 0 else math.inf]
    return min(candidates)


def _rk4_propagator(M: np.ndarray, h: float) -> np.ndarray:
    """The RK4 update matrix I + hM + (hM)^2/2 + (hM)^3/6 + (hM)^4/24 of a linear ODE."""
    hM = h * M
    eye = np.eye(M.shape[0], dtype=complex)
    # Horner form
    return eye + hM @ (eye + hM @ (eye / 2 + hM @ (eye / 6 + hM / 24)))


def evolve(
    L: Superoperator,
    rho0: np.ndarray,
    t_final: float,
    dt: float | None = None,
    stride: int = 1,
    validate: bool = True,
) -> Trajectory:
    """Classical RK4 on vec(rho)' = L vec(rho), sampled every ``stride`` steps.

    The step is shrunk (never grown) so that an integer number of steps hits
    ``t_final``.  For small systems the RK4 update matrix is formed once and
    raised to the stride power; that is the same iterate, just cheaper.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if validate:
        check_density_matrix(rho0)
    if t_final < 0:
        raise ValueError(f"t_final must be >= 0, got {t_final!r}")
    if dt is None:
        dt = max_stable_step(L)
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    norm = L.norm2()
    if dt * norm > STEP_GUARD * (1 + 1e-12):
        raise IntegrationError(f"step-size guard: dt*|L| = {dt * norm:.3g} > {STEP_GUARD}")
    stride = max(int(stride), 1)
    n_steps = math.ceil(t_final / dt - 1e-9) if t_final > 0 else 0
    h = t_final / n_steps if n_steps else 0.0
    d = L.d

    chunks = [stride] * (n_steps // stride)
    if n_steps % stride:
        chunks.append(n_steps % stride)

    if L.is_small:
        P = _rk4_propagator(L.dense(), h)
        powers: dict[int, np.ndarray] = {}

        def advance(v, k):
            if k not in powers:
                powers[k] = np.linalg.matrix_power(P, k)
            return powers[k] @ v

    else:
        M = L.matrix

        def advance(v, k):
            for _ in range(k):
                k1 = M @ v
                k2 = M @ (v + (h / 2) * k1)
                k3 = M @ (v + (h / 2) * k2)
                k4 = M @ (v + h * k3)
                v = v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            return v

    diag = np.arange(d) * (d + 1)
    v = vec(rho0).copy()
    times = [0.0]
    states = [rho0.copy()]
    done = 0
    for k in chunks:
        v = advance(v, k)
        done += k
        tr = v[diag].sum()
        if abs(tr - 1) > TRACE_DRIFT_PER_STEP * k:
            raise IntegrationError(f"trace drift {abs(tr - 1):.3g} over {k} steps at t={done * h:.6g}; reduce dt")
        v = v / tr.real
        times.append(done * h)
        states.append(unvec(v, d).copy())
    return Trajectory(np.array(times), np.array(states), h, tuple(L.dims))


@dataclass(frozen=True)
class CrosscheckReport:
    spec: str
    trace_distance: float
    horizon: float
    step_size: float
    steps: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.trace_distance <= self.tolerance


def oracle_crosscheck(spec: FridgeSpec, horizon: float | None = None, tol: float = ORACLE_TOL, strict: bool = True) -> CrosscheckReport:
    """Compare the linear-solve steady state with a long RK4 run from the thermal product state."""
    ss = steady_state(assemble_fridge_liouvillian(spec, frame="lab"), label=spec.describe())
    L_rot = assemble_fridge_liouvillian(spec, frame="rotating")
    if horizon is None:
        horizon = HORIZON_FACTOR / min(spec.rates)
    dt = default_step(L_rot, spec.rates + (spec.coupling,))
    n_steps = max(math.ceil(horizon / dt - 1e-9), 1)
    traj = evolve(L_rot, thermal_product(spec), horizon, dt, stride=n_steps)
    dist = trace_distance(traj.final, ss.state)
    report = CrosscheckReport(spec.describe(), dist, horizon, traj.step_size, n_steps, tol)
    if strict and not report.passed:
        raise NumericalCheckError(f"oracle mismatch: trace distance {dist:.3g} > {tol:g} for {spec.describe()}")
    return report
