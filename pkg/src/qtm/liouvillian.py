"""Reset-model generators as superoperators on column-major vectorized states.

A superoperator here is a sparse (CSR) d^2 x d^2 matrix ``M`` with
``vec(L(rho)) = M @ vec(rho)`` and ``vec`` the column stacking from
:mod:`qtm.states`.  With that convention ``vec(A X B) = (B^T kron A) vec(X)``.

Both machines have a free Hamiltonian that commutes with the interaction,
and the reset channels commute with free evolution (thermal states are
diagonal, partial traces commute with local unitaries).  So the lab-frame
generator splits as ``L = L_free + L_rot`` with ``[L_free, L_rot] = 0``, and
every quantity we measure (populations, coherences inside the degenerate
pairs) is identical in the frame rotating with H0.  ``frame="rotating"``
drops ``L_free``; its spectral norm is set by g and p_i instead of the
energies, which is what makes long time integration cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .machines import (
    EngineSpec,
    FridgeSpec,
    build_free_hamiltonian_fridge,
    build_hamiltonians_engine,
    build_interaction_fridge,
)
from .states import check_density_matrix, unvec, vec

DENSE_LIMIT = 4096  # d^2 up to which exact dense norms and propagators are used
FRAMES = ("lab", "rotating")


@dataclass(frozen=True, eq=False)
class Superoperator:
    matrix: sp.csr_matrix
    dims: tuple[int, ...]

    @property
    def d(self) -> int:
        return int(np.prod(self.dims))

    @property
    def is_small(self) -> bool:
        return self.d**2 <= DENSE_LIMIT

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.d)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm2(self) -> float:
        """Spectral norm; exact for small systems, the bound sqrt(|M|_1 |M|_inf) otherwise."""
        if self.is_small:
            return float(np.linalg.norm(self.dense(), 2))
        a = abs(self.matrix)
        n1 = a.sum(axis=0).max()
        ninf = a.sum(axis=1).max()
        return float(np.sqrt(n1 * ninf))

    def __add__(self, other: "Superoperator") -> "Superoperator":
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch {self.dims} vs {other.dims}")
        return Superoperator((self.matrix + other.matrix).tocsr(), self.dims)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "Superoperator":
        return Superoperator((scalar * self.matrix).tocsr(), self.dims)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator((self.matrix @ other.matrix).tocsr(), self.dims)


def _identity(d: int) -> sp.csr_matrix:
    return sp.identity(d, dtype=complex, format="csr")


def _embed_sparse(op: np.ndarray, index: int, dims: Sequence[int]) -> sp.csr_matrix:
    out = sp.identity(1, dtype=complex, format="csr")
    for i, d in enumerate(dims):
        factor = sp.csr_matrix(op) if i == index else _identity(d)
        out = sp.kron(out, factor, format="csr")
    return out


def left_right(A, B) -> sp.csr_matrix:
    """Superoperator of X -> A X B."""
    return sp.kron(sp.csr_matrix(B).T, sp.csr_matrix(A), format="csr")


def coherent_generator(H: np.ndarray, dims: Sequence[int] | None = None, atol: float = 1e-10) -> Superoperator:
    """rho -> -i [H, rho]."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {H.shape}")
    dev = float(np.max(np.abs(H - H.conj().T), initial=0.0))
    if dev > atol:
        raise ValueError(f"Hamiltonian is not Hermitian (max deviation {dev:.3g})")
    d = H.shape[0]
    dims = (d,) if dims is None else tuple(dims)
    if int(np.prod(dims)) != d:
        raise ValueError(f"dims {dims} do not match Hamiltonian dimension {d}")
    eye = _identity(d)
    Hs = sp.csr_matrix(H)
    M = -1j * (sp.kron(eye, Hs) - sp.kron(Hs.T, eye))
    return Superoperator(M.tocsr(), dims)


def reset_dissipator(subsystem_index: int, tau: np.ndarray, p: float, dims: Sequence[int]) -> Superoperator:
    """rho -> p (tau (x)_i Tr_i rho - rho), tau placed back in slot ``subsystem_index``."""
    dims = tuple(int(k) for k in dims)
    if not 0 <= subsystem_index < len(dims):
        raise IndexError(f"subsystem index {subsystem_index} out of range for dims {dims}")
    if dims[subsystem_index] != 2:
        raise ValueError(f"reset acts on a qubit; subsystem {subsystem_index} has dimension {dims[subsystem_index]}")
    tau = np.asarray(tau, dtype=complex)
    if tau.shape != (2, 2):
        raise ValueError(f"tau must be 2x2, got {tau.shape}")
    check_density_matrix(tau)
    if not p > 0:
        raise ValueError(f"reset rate must be > 0, got {p!r}")
    d = int(np.prod(dims))
    M = sp.csr_matrix((d * d, d * d), dtype=complex)
    for x in range(2):
        for y in range(2):
            if tau[x, y] == 0:
                continue
            for k in range(2):
                A = np.zeros((2, 2))
                A[x, k] = 1.0
                B = np.zeros((2, 2))
                B[k, y] = 1.0
                M = M + tau[x, y] * left_right(_embed_sparse(A, subsystem_index, dims), _embed_sparse(B, subsystem_index, dims))
    M = p * (M - _identity(d * d))
    return Superoperator(M.tocsr(), dims)


def _check_frame(frame: str) -> None:
    if frame not in FRAMES:
        raise ValueError(f"frame must be one of {FRAMES}, got {frame!r}")


def fridge_free_generator(spec: FridgeSpec) -> Superoperator:
    return coherent_generator(build_free_hamiltonian_fridge(spec), spec.dims)


def assemble_fridge_liouvillian(spec: FridgeSpec, frame: str = "lab") -> Superoperator:
    _check_frame(frame)
    Hint = build_interaction_fridge(spec.coupling)
    H = Hint if frame == "rotating" else build_free_hamiltonian_fridge(spec) + Hint
    L = coherent_generator(H, spec.dims)
    for i, q in enumerate(spec.qubits):
        L = L + reset_dissipator(i, q.thermal_state(), q.reset_rate, spec.dims)
    return L


def engine_free_generator(spec: EngineSpec) -> Superoperator:
    H0, _ = build_hamiltonians_engine(spec)
    return coherent_generator(H0, spec.dims)


def assemble_engine_liouvillian(spec: EngineSpec, frame: str = "lab") -> Superoperator:
    """Generator for the engine; the weight (subsystem 2) has no dissipator."""
    _check_frame(frame)
    H0, Hint = build_hamiltonians_engine(spec)
    H = Hint if frame == "rotating" else H0 + Hint
    L = coherent_generator(H, spec.dims)
    for i, q in enumerate(spec.qubits):
        L = L + reset_dissipator(i, q.thermal_state(), q.reset_rate, spec.dims)
    return L
