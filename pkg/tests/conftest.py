import numpy as np
import pytest

from gaspipe import case_study, derive_constants

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def consts():
    return derive_constants(case_study())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
