import sys

import numpy as np
import pytest

from qtm.machines import EngineSpec, FridgeSpec


@pytest.fixture
def fridge():
    # the worked example: E1 = 1 sits well inside the cooling regime (E1* = 0.5)
    return FridgeSpec.build(1.0, 1.0, (10.0, 5.0, 4.0), 1e-3, 1e-2)


@pytest.fixture
def small_engine():
    return EngineSpec.build(1.0, 0.5, (10.0, 5.0), 0.05, 0.02, N=5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng, d, rank=None):
    rank = rank or d
    A = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
