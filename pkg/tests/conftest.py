import datetime as dt

import numpy as np
import pytest

from ifrlag.domain import DailySeries, Dataset

ORIGIN = dt.date(2020, 3, 1)


def make_dataset(cases, tests, deaths=None, population=1_000_000,
                 origin=ORIGIN, label="test"):
    cases = np.asarray(cases, dtype=float)
    tests = np.asarray(tests, dtype=float)
    if deaths is None:
        deaths = np.zeros_like(cases)
    return Dataset(
        cases=DailySeries(origin, cases),
        deaths=DailySeries(origin, np.asarray(deaths, dtype=float)),
        tests=DailySeries(origin, tests),
        population=population,
        label=label,
    )


def bell(k, total=1e5, center_frac=0.4, width_frac=0.12):
    """Single smooth bump, handy as a generic infection curve."""
    days = np.arange(k, dtype=float)
    curve = np.exp(-0.5 * ((days - center_frac * k) / (width_frac * k)) ** 2)
    return total * curve / curve.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)
