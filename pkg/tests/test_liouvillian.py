import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtm.liouvillian import (
    assemble_engine_liouvillian,
    assemble_fridge_liouvillian,
    coherent_generator,
    fridge_free_generator,
    reset_dissipator,
)
from qtm.machines import FridgeSpec, build_hamiltonians_engine, fridge_hamiltonian, thermal_product
from qtm.states import partial_trace, vec

from conftest import random_density

seeds = st.integers(0, 2**31 - 1)


def reset_by_hand(rho, i, tau, p, dims):
    """p (tau_i (x) Tr_i rho - rho), with the factors put back in place via einsum."""
    n = len(dims)
    rest = partial_trace(rho, dims, [k for k in range(n) if k != i])
    other = [dims[k] for k in range(n) if k != i]
    # tau (x) rest is indexed [i, rest, i', rest']; move subsystem i back to slot i
    full = np.kron(tau, rest).reshape([dims[i]] + other + [dims[i]] + other)
    order = list(range(1, i + 1)) + [0] + list(range(i + 1, n))
    perm = order + [n + k for k in order]
    full = full.transpose(perm).reshape(rho.shape)
    return p * (full - rho)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([0, 2]))
def test_reset_dissipator_matches_direct_action(seed, i):
    rng = np.random.default_rng(seed)
    dims = (2, 3, 2)
    rho = random_density(rng, 12)
    tau = random_density(rng, dims[i])
    L = reset_dissipator(i, tau, 0.37, dims)
    assert np.allclose(L.apply(rho), reset_by_hand(rho, i, tau, 0.37, dims), atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_coherent_generator_matches_commutator(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = A + A.conj().T
    rho = random_density(rng, 6)
    L = coherent_generator(H)
    assert np.allclose(L.apply(rho), -1j * (H @ rho - rho @ H), atol=1e-12)


def test_coherent_generator_rejects_non_hermitian():
    with pytest.raises(ValueError):
        coherent_generator(np.array([[0, 1], [0, 0]], dtype=complex))


def test_reset_dissipator_errors():
    tau = np.diag([0.7, 0.3]).astype(complex)
    with pytest.raises(IndexError):
        reset_dissipator(3, tau, 0.1, (2, 2, 2))
    with pytest.raises(ValueError):
        reset_dissipator(0, np.eye(3) / 3, 0.1, (2, 2, 2))
    with pytest.raises(ValueError):
        reset_dissipator(0, tau, 0.0, (2, 2, 2))


def test_reset_fixes_bath_product(fridge):
    rho = thermal_product(fridge)
    for i, q in enumerate(fridge.qubits):
        L = reset_dissipator(i, q.thermal_state(), q.reset_rate, fridge.dims)
        assert np.abs(L.apply(rho)).max() < 1e-17


@pytest.mark.parametrize("frame", ["lab", "rotating"])
def test_fridge_liouvillian_trace_and_hermiticity(fridge, frame, rng):
    L = assemble_fridge_liouvillian(fridge, frame)
    M = L.dense()
    # trace preservation: the trace functional is a left null vector
    assert np.abs(vec(np.eye(8)).conj() @ M).max() < 1e-14
    for _ in range(5):
        rho = random_density(rng, 8)
        out = L.apply(rho)
        assert np.allclose(out, out.conj().T, atol=1e-15)


def test_fridge_lab_equals_direct_master_equation(fridge, rng):
    L = assemble_fridge_liouvillian(fridge, "lab")
    H = fridge_hamiltonian(fridge)
    rho = random_density(rng, 8)
    expected = -1j * (H @ rho - rho @ H)
    for i, q in enumerate(fridge.qubits):
        expected += reset_by_hand(rho, i, q.thermal_state(), q.reset_rate, fridge.dims)
    assert np.allclose(L.apply(rho), expected, atol=1e-14)


def test_rotating_frame_commutes(fridge):
    lab = assemble_fridge_liouvillian(fridge, "lab").dense()
    rot = assemble_fridge_liouvillian(fridge, "rotating").dense()
    free = fridge_free_generator(fridge).dense()
    assert np.allclose(lab - rot, free, atol=1e-15)
    assert np.abs(free @ rot - rot @ free).max() < 1e-14


def test_null_space_is_one_dimensional(fridge):
    s = np.linalg.svd(assemble_fridge_liouvillian(fridge).dense(), compute_uv=False)
    assert s[-1] < 1e-14
    assert s[-2] > 1e-5


def test_engine_liouvillian(small_engine, rng):
    L = assemble_engine_liouvillian(small_engine, "lab")
    H0, Hint = build_hamiltonians_engine(small_engine)
    d = L.d
    assert d == 4 * small_engine.ladder_levels
    rho = random_density(rng, d)
    dims = small_engine.dims
    expected = -1j * ((H0 + Hint) @ rho - rho @ (H0 + Hint))
    for i, q in enumerate(small_engine.qubits):
        expected += reset_by_hand(rho, i, q.thermal_state(), q.reset_rate, dims)
    assert np.allclose(L.apply(rho), expected, atol=1e-13)


def test_norm_bound_dominates_exact(fridge):
    L = assemble_fridge_liouvillian(fridge)
    exact = np.linalg.norm(L.dense(), 2)
    assert L.norm2() == pytest.approx(exact, rel=1e-10)


def test_invalid_frame(fridge):
    with pytest.raises(ValueError):
        assemble_fridge_liouvillian(fridge, "interaction")
