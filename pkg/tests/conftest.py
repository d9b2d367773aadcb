import numpy as np
import pytest

from phasespeed import Bound, PhaseGrid, ScenarioConfig, UnitsSpec, run_scenario


@pytest.fixture
def units():
    return UnitsSpec()


@pytest.fixture
def small_grid():
    return PhaseGrid.centered(6.0, 6.0, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture(scope="session")
def classical_quench():
    """Default classical quench: matched Gaussian, 500 steps over [0, 5]."""
    return run_scenario(ScenarioConfig())


@pytest.fixture(scope="session")
def quantum_quench():
    """Ground-state quench with both quantum bounds."""
    return run_scenario(ScenarioConfig(scenario="quench-quantum", state_kind="ho-eigenstate",
                                       bounds=(Bound.QSL, Bound.SSL)))


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; returns the verdict so tests can assert on it."""
    def report(number, title, passed, detail):
        line = f"criterion {number:>2}  {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        _CRITERIA.append(line)
        print(line)
        return passed
    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
