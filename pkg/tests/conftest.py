import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jordancone.polynomial import PolyMap  # noqa: E402
from jordancone.scalars import to_exact_array  # noqa: E402
from jordancone.series import CurveSeries  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def example_map(alpha=Fraction(1)) -> PolyMap:
    """-x y^3 + x^5 + alpha y^5"""
    return PolyMap.from_terms(2, [{(1, 3): Fraction(-1), (5, 0): Fraction(1), (0, 5): alpha}])


def curve(rows) -> CurveSeries:
    return CurveSeries(to_exact_array(np.array(rows, dtype=object)))


Y_AXIS = [[0, 0], [0, 1]]
BRANCH = [[0, 0], [0, 0], [0, 0], [1, 0], [0, 1]]


@pytest.fixture
def G():
    return example_map()


@pytest.fixture
def z1():
    return curve(Y_AXIS)


@pytest.fixture
def z2():
    return curve(BRANCH)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
