"""Density-matrix helpers: vectorization, tensor products, partial traces, checks."""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-major stacking: ``vec(rho)[a + d*b] == rho[a, b]``."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    if d is None:
        d = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((d, d), order="F")


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, factors)


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced state on the subsystems listed in ``keep`` (in ascending order)."""
    dims = tuple(dims)
    n = len(dims)
    keep = sorted(keep)
    traced = [i for i in range(n) if i not in keep]
    t = np.asarray(rho).reshape(dims + dims)
    # trace out from the highest axis down so earlier axis numbers stay valid
    for k, i in enumerate(sorted(traced, reverse=True)):
        m = n - k
        t = np.trace(t, axis1=i, axis2=i + m)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(dk, dk)


def reduced_state(rho: np.ndarray, dims: Sequence[int], index: int) -> np.ndarray:
    return partial_trace(rho, dims, [index])


def embed(op: np.ndarray, index: int, dims: Sequence[int]) -> np.ndarray:
    """``op`` acting on subsystem ``index``, identity elsewhere."""
    factors = [np.eye(d) for d in dims]
    factors[index] = op
    return kron_all(factors)


def basis_projector(index: int, d: int) -> np.ndarray:
    P = np.zeros((d, d), dtype=complex)
    P[index, index] = 1.0
    return P


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    diff = rho - sigma
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def hermitian_part(rho: np.ndarray) -> np.ndarray:
    return (rho + rho.conj().T) / 2


def density_matrix_defects(
    rho: np.ndarray,
    herm_tol: float = HERMITIAN_TOL,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = PSD_TOL,
) -> list[str]:
    """Names of the density-matrix invariants that ``rho`` violates (empty if valid)."""
    defects = []
    herm = float(np.max(np.abs(rho - rho.conj().T), initial=0.0))
    if herm > herm_tol:
        defects.append(f"non-Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        defects.append(f"trace {tr.real:.15g}{tr.imag:+.3g}j != 1")
    lam = float(np.min(np.linalg.eigvalsh(hermitian_part(rho))))
    if lam < psd_tol:
        defects.append(f"negative eigenvalue {lam:.3g}")
    return defects


def check_density_matrix(rho: np.ndarray, **tols) -> np.ndarray:
    defects = density_matrix_defects(rho, **tols)
    if defects:
        raise ValueError("invalid density matrix: " + "; ".join(defects))
    return rho
