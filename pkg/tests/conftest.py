import numpy as np
import pytest

from evocoef import ClosedForm, CoefficientFn, SpaceGrid, TimeGrid


def closed(family, grid, kind="alpha", **params):
    return CoefficientFn.from_closed_form(ClosedForm(family, params), grid, kind)


@pytest.fixture
def unit_time():
    return TimeGrid(1.0, 64)


@pytest.fixture
def box1():
    return SpaceGrid(1, np.pi, 32)


# one line per acceptance criterion, echoed after the test session
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
