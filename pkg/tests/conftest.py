import numpy as np
import pytest

from percwalk import attractors
from percwalk.hilbert import Topology

# (criterion number, passed, detail) appended by the acceptance tests
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def line4_basis():
    return attractors.orthonormal_basis(Topology.line(4))


@pytest.fixture(scope="session")
def line3_basis():
    return attractors.orthonormal_basis(Topology.line(3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_density(rng, d, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_unit(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
