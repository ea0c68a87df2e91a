import datetime as dt
from pathlib import Path

import numpy as np
import pytest

from yieldpca.curve_store import YieldCurve, YieldCurveSeries
from yieldpca.synthetic import simulate_curve_series

DATA = Path(__file__).parent / "data"
KNOT_TENORS = (1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0)

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def knot_series():
    return simulate_curve_series(300, KNOT_TENORS, seed=7)


@pytest.fixture
def flat3():
    return YieldCurve.flat(0.03, KNOT_TENORS)


@pytest.fixture
def small_series():
    rng = np.random.default_rng(11)
    dates = tuple(dt.date(2020, 1, 1) + dt.timedelta(days=i) for i in range(7))
    rates = 0.03 + 0.002 * np.cumsum(rng.normal(size=(7, 3)), axis=0)
    return YieldCurveSeries(dates, [1.0, 5.0, 10.0], rates)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
