import math

import pytest

from fene2d.configspace import FeneParams, build_basis
from fene2d.fluid import TorusGrid


@pytest.fixture(scope="session")
def basis8():
    return build_basis(FeneParams(1.0, 8, 2))


@pytest.fixture(scope="session")
def grid32():
    return TorusGrid(32, 32, 2 * math.pi)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
