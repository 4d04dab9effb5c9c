import warnings

import pytest

from conebranch.errors import IntegrabilityWarning
from conebranch.jordan import build_algebra
from conebranch.representation import make_scalar_rep

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def spin2():
    return build_algebra("spin", 2)


@pytest.fixture(scope="session")
def spin3():
    return build_algebra("spin", 3)


@pytest.fixture(scope="session")
def spin4():
    return build_algebra("spin", 4)


@pytest.fixture(scope="session")
def sym2():
    return build_algebra("sym", 2)


@pytest.fixture(scope="session")
def sym3():
    return build_algebra("sym", 3)


@pytest.fixture(scope="session")
def herm2():
    return build_algebra("herm", 2)


def scalar_rep(A, lam):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrabilityWarning)
        return make_scalar_rep(A, lam)
