import numpy as np
import pytest

from echo_tdoa.geometry import linear_array
from echo_tdoa.signal import ChirpSpec, synthesize_template


@pytest.fixture(scope="session")
def spec():
    return ChirpSpec()


@pytest.fixture(scope="session")
def template(spec):
    return synthesize_template(spec, 250e3)


@pytest.fixture
def array3():
    return linear_array((-1.0, 0.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the run summary."""
    def record(number, ok, detail):
        _ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
