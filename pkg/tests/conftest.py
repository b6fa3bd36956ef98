import numpy as np
import pytest

from tibrw.env import VarianceProfile

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def inc():
    return VarianceProfile.two_phase(1.0, 4.0)


@pytest.fixture
def dec():
    return VarianceProfile.two_phase(4.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20111118)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
