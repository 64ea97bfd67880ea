import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from qtm.errors import DegenerateSteadyStateError, IntegrationError
from qtm.liouvillian import assemble_fridge_liouvillian, coherent_generator, reset_dissipator
from qtm.machines import FridgeSpec, thermal_product, thermal_qubit_state
from qtm.observables import interaction_current, population_shift
from qtm.solvers import evolve, fridge_steady_state, max_stable_step, oracle_crosscheck, steady_state
from qtm.states import density_matrix_defects, trace_distance, unvec

from conftest import random_density

# from scripts/oracle_fridge_mpmath.py (40-digit solve, independent construction)
ORACLE_J = 3.621138450265206979e-6
ORACLE_Q = (0.47139967407079480692, 0.40493347833781320661, 0.43420236066393668899)


def test_worked_example_against_mpmath(fridge):
    ss = fridge_steady_state(fridge)
    assert interaction_current(ss.state, fridge) == pytest.approx(ORACLE_J, rel=1e-12)
    for i, q in enumerate(ORACLE_Q):
        r = fridge.qubits[i].thermal_excited
        assert r - population_shift(ss.state, fridge, i + 1, ss.deviation) == pytest.approx(q, rel=1e-14)


def test_steady_state_matches_null_space(fridge):
    L = assemble_fridge_liouvillian(fridge, "lab")
    ns = scipy.linalg.null_space(L.dense())
    assert ns.shape[1] == 1
    rho = unvec(ns[:, 0], 8)
    rho /= np.trace(rho)
    ss = steady_state(L)
    assert trace_distance(ss.state, rho) < 1e-12
    assert ss.residual < 1e-12 * ss.norm


def test_frames_agree_on_steady_state(fridge):
    lab = steady_state(assemble_fridge_liouvillian(fridge, "lab"), reference=thermal_product(fridge))
    rot = fridge_steady_state(fridge, "rotating")
    assert trace_distance(lab.state, rot.state) < 1e-13


def test_uncoupled_machine_is_thermal_product():
    spec = FridgeSpec.build(1.3, 0.7, (9.0, 4.0, 2.0), (0.02, 0.003, 0.05), 0.0)
    ss = fridge_steady_state(spec)
    assert np.abs(ss.state - thermal_product(spec)).max() < 1e-15


def test_degenerate_generator_raises():
    H = np.diag([0.0, 1.0])
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(coherent_generator(H))


def test_single_qubit_relaxation_closed_form():
    p, E, T = 0.3, 1.0, 0.8
    tau = thermal_qubit_state(E, T)
    r = tau[1, 1].real
    L = reset_dissipator(0, tau, p, (2,))
    rho0 = np.array([[0.2, 0.1 + 0.2j], [0.1 - 0.2j, 0.8]])
    traj = evolve(L, rho0, 10 / p, dt=1e-3 / p, stride=250)
    decay = np.exp(-p * traj.times)
    assert np.abs(traj.states[:, 1, 1].real - (r + (0.8 - r) * decay)).max() < 1e-9
    assert np.abs(traj.states[:, 0, 1] - (0.1 + 0.2j) * decay).max() < 1e-9


def test_rk4_fourth_order():
    p = 1.0
    tau = thermal_qubit_state(1.0, 1.0)
    L = reset_dissipator(0, tau, p, (2,))
    rho0 = np.diag([0.0, 1.0]).astype(complex)
    exact = tau[1, 1].real + (1 - tau[1, 1].real) * np.exp(-2.0)
    errs = [abs(evolve(L, rho0, 2.0, dt=h, validate=True).final[1, 1].real - exact) for h in (0.08 / p, 0.04 / p)]
    # halving the step cuts the error by ~2^4
    assert errs[0] / errs[1] >= 12


def test_step_guard(fridge):
    L = assemble_fridge_liouvillian(fridge, "lab")
    with pytest.raises(IntegrationError):
        evolve(L, thermal_product(fridge), 1.0, dt=2 * max_stable_step(L))


def test_evolve_rejects_invalid_state(fridge):
    L = assemble_fridge_liouvillian(fridge, "rotating")
    with pytest.raises(ValueError):
        evolve(L, np.eye(8), 1.0)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_evolution_is_linear_and_physical(seed):
    rng = np.random.default_rng(seed)
    spec = FridgeSpec.build(1.0, 0.5, (6.0, 3.0, 2.0), (0.05, 0.02, 0.04), 0.03)
    L = assemble_fridge_liouvillian(spec, "rotating")
    a, b = random_density(rng, 8), random_density(rng, 8)
    w = rng.uniform()
    t = 50.0
    ta, tb = evolve(L, a, t, stride=20), evolve(L, b, t, stride=20)
    tm = evolve(L, w * a + (1 - w) * b, t, stride=20)
    assert np.allclose(tm.states, w * ta.states + (1 - w) * tb.states, atol=1e-12)
    target = fridge_steady_state(spec).state
    for traj in (ta, tb):
        for s in traj.states:
            assert density_matrix_defects(s) == []
        # reset channels are contractive: distance to the fixed point never grows
        dist = [trace_distance(s, target) for s in traj.states]
        assert all(d1 <= d0 + 1e-9 for d0, d1 in zip(dist, dist[1:]))


def test_oracle_crosscheck(fridge):
    report = oracle_crosscheck(fridge)
    assert report.passed
    assert report.trace_distance < 1e-8
