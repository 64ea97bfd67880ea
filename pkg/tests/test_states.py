import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtm.states import (
    check_density_matrix,
    density_matrix_defects,
    embed,
    kron_all,
    partial_trace,
    trace_distance,
    unvec,
    vec,
)

from conftest import random_density

seeds = st.integers(0, 2**31 - 1)


@settings(max_examples=30)
@given(seeds)
def test_column_major_identity(seed):
    rng = np.random.default_rng(seed)
    A, X, B = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    assert np.allclose(vec(A @ X @ B), np.kron(B.T, A) @ vec(X))
    assert np.array_equal(unvec(vec(X)), X)


@settings(max_examples=30)
@given(seeds)
def test_partial_trace_of_product(seed):
    rng = np.random.default_rng(seed)
    a, b, c = random_density(rng, 2), random_density(rng, 3), random_density(rng, 2)
    rho = kron_all([a, b, c])
    assert np.allclose(partial_trace(rho, (2, 3, 2), [1]), b)
    assert np.allclose(partial_trace(rho, (2, 3, 2), [0, 2]), np.kron(a, c))


def test_partial_trace_by_hand():
    rng = np.random.default_rng(7)
    rho = random_density(rng, 4)
    # Tr_2 with explicit sums, qubit 1 is the more significant bit
    ref = np.array([[rho[2 * i, 2 * j] + rho[2 * i + 1, 2 * j + 1] for j in range(2)] for i in range(2)])
    assert np.allclose(partial_trace(rho, (2, 2), [0]), ref)


def test_embed():
    Z = np.diag([1.0, -1.0])
    assert np.allclose(embed(Z, 1, (2, 2, 2)), np.kron(np.kron(np.eye(2), Z), np.eye(2)))


def test_trace_distance():
    up, down = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert trace_distance(up, down) == pytest.approx(1.0)
    plus = np.full((2, 2), 0.5)
    assert trace_distance(up, plus) == pytest.approx(np.sqrt(0.5))


def test_density_checks():
    rng = np.random.default_rng(3)
    rho = random_density(rng, 4)
    assert density_matrix_defects(rho) == []
    check_density_matrix(rho)
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        check_density_matrix(np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([0.6, 0.6]))
