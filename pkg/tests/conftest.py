import numpy as np
import pytest

from qasep.config import BoundaryRates
from qasep.qspecial import ABParameters, rates_from_ab

# lines collected by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def random_max_current_rates(rng, q):
    """Physical rates whose boundary parameters sit inside the unit disc."""
    a, b = rng.uniform(0.05, 0.7, 2)
    at, bt = -rng.uniform(0.0, 0.5, 2)
    return rates_from_ab(ABParameters(a, at, b, bt), q)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def generic_rates():
    return BoundaryRates(0.6, 0.7, 0.2, 0.1)


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _report(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report
