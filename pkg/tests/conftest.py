import numpy as np
import pytest

from torus_bohm.geometry import TorusShape
from torus_bohm.spectral import flat_states, table1_states
from torus_bohm.wavefield import Superposition

SQRT_HALF = np.sqrt(0.5)


@pytest.fixture(scope="session")
def shape():
    return TorusShape(1.0, 0.5)


@pytest.fixture(scope="session")
def states(shape):
    return table1_states(shape)


def flat_analog(state):
    return flat_states(state.n, state.m, state.parity, state.shape)


def make(states, *terms, flat=False):
    """terms: ((parity, n, m), weight) pairs."""
    pick = (lambda key: flat_analog(states[key])) if flat else (lambda key: states[key])
    return Superposition(tuple((pick(key), w) for key, w in terms))


@pytest.fixture(scope="session")
def fig1(states):
    return make(states, (("+", 3, 2), np.sqrt(2 / 3)), (("-", 3, 2), 1j * np.sqrt(1 / 3)))


@pytest.fixture(scope="session")
def fig2(states):
    return make(states, (("-", 3, 2), np.sqrt(2 / 3)), (("+", 2, 1), 1j * np.sqrt(1 / 3)))


@pytest.fixture(scope="session")
def table2_torus(states):
    return make(states, (("+", 3, 2), SQRT_HALF), (("-", 3, 2), SQRT_HALF))


@pytest.fixture(scope="session")
def table2_flat(states):
    return make(states, (("+", 3, 2), SQRT_HALF), (("-", 3, 2), SQRT_HALF), flat=True)


@pytest.fixture(scope="session")
def table3_torus(states):
    return make(states, (("+", 1, 0), SQRT_HALF), (("-", 1, 0), SQRT_HALF))


@pytest.fixture(scope="session")
def table3_flat(states):
    return make(states, (("+", 1, 0), SQRT_HALF), (("-", 1, 0), SQRT_HALF), flat=True)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for the acceptance summary."""
    lines = request.config._acceptance_lines

    def record(criterion: str, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
