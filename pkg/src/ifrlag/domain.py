"""Core value types shared by every stage of the pipeline.

Counts are stored as float64 even when they originate as reported integers:
every downstream estimate (infections, expected deaths) is non-integral.
Integrality of reported series is checked at ingest, before widening.

Day indices are 1-based everywhere they are user-facing (errors, reports,
CSV/JSON output); internal numpy arrays are 0-based as usual.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import (
    CasesExceedTests,
    DomainError,
    LengthMismatch,
    NegativeValue,
    PopulationExceeded,
)


def as_values(x) -> np.ndarray:
    """Coerce a DailySeries, ShiftedSeries or array-like to a float64 vector."""
    v = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if v.ndim != 1:
        raise DomainError(f"expected a 1-D series, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class DailySeries:
    """One value per calendar day, starting at origin_day. Immutable."""

    origin_day: dt.date
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or len(v) < 1:
            raise LengthMismatch("a daily series needs at least one day")
        if not np.all(np.isfinite(v)):
            day = int(np.flatnonzero(~np.isfinite(v))[0]) + 1
            raise NegativeValue(f"non-finite value at day {day}")
        if np.any(v < 0):
            day = int(np.flatnonzero(v < 0)[0]) + 1
            raise NegativeValue(f"negative value {v[day - 1]} at day {day}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    def day_index(self, day: dt.date) -> int:
        """1-based index of a calendar date. Dates before origin are rejected."""
        idx = (day - self.origin_day).days + 1
        if idx < 1:
            raise DomainError(f"{day} precedes series origin {self.origin_day}")
        if idx > len(self):
            raise DomainError(f"{day} is past the end of the series")
        return idx

    def date_of(self, day_index: int) -> dt.date:
        if not 1 <= day_index <= len(self):
            raise DomainError(f"day index {day_index} outside [1, {len(self)}]")
        return self.origin_day + dt.timedelta(days=day_index - 1)


@dataclass(frozen=True)
class Dataset:
    """Aligned daily cases, deaths and tests for one region."""

    cases: DailySeries
    deaths: DailySeries
    tests: DailySeries
    population: int
    label: str = ""

    def __len__(self) -> int:
        return len(self.cases)


@dataclass(frozen=True)
class AntibodyAnchor:
    """Cumulative infections from one serology study: A infected by day ℓ."""

    day_index: int
    infected_count: float

    def __post_init__(self):
        if self.day_index < 1:
            raise DomainError(f"anchor day index {self.day_index} must be >= 1")
        if not self.infected_count > 0:
            raise DomainError("anchor infected count must be positive")


def anchor_from_study(
    dataset: Dataset,
    study_date: dt.date,
    fraction: float | None = None,
    count: float | None = None,
) -> AntibodyAnchor:
    """Build an anchor from a study date and either a prevalence fraction or a count."""
    if (fraction is None) == (count is None):
        raise DomainError("give exactly one of fraction or count")
    if fraction is not None:
        count = fraction * dataset.population
    if count > dataset.population:
        raise DomainError("anchor count exceeds population")
    return AntibodyAnchor(dataset.cases.day_index(study_date), float(count))


@dataclass(frozen=True)
class FitResult:
    """Best-fit lag bounds, scaling factor (the IFR) and squared error.

    ifr may be negative: the minimizer is unconstrained and downstream code
    flags rather than clamps (clamping would bias residual bookkeeping).
    """

    lag_a: int
    lag_b: int
    ifr: float
    error: float

    @property
    def mean_lag(self) -> float:
        return (self.lag_a + self.lag_b) / 2.0


def validate_dataset(raw: Dataset) -> Dataset:
    """Check all Dataset invariants; return the dataset unchanged if they hold.

    Raises a structured error naming the first violated invariant and the
    1-based day index. Idempotent.
    """
    c, d, t = raw.cases, raw.deaths, raw.tests
    if not (len(c) == len(d) == len(t)):
        raise LengthMismatch(
            f"series lengths differ: cases={len(c)} deaths={len(d)} tests={len(t)}"
        )
    if not (c.origin_day == d.origin_day == t.origin_day):
        raise LengthMismatch("series origins differ")
    if raw.population < 1:
        raise DomainError(f"population {raw.population} must be positive")
    for name, series in (("cases", c), ("deaths", d), ("tests", t)):
        neg = np.flatnonzero(series.values < 0)
        if len(neg):
            raise NegativeValue(f"negative {name} at day {int(neg[0]) + 1}")
    over_pop = np.flatnonzero(t.values > raw.population)
    if len(over_pop):
        raise PopulationExceeded(
            f"tests exceed population at day {int(over_pop[0]) + 1}"
        )
    over = np.flatnonzero(c.values > t.values)
    if len(over):
        day = int(over[0]) + 1
        raise CasesExceedTests(
            f"cases ({c.values[day - 1]:g}) exceed tests ({t.values[day - 1]:g}) "
            f"at day {day}"
        )
    return raw


def error_metric(x, y) -> float:
    """Sum of squared elementwise differences between two same-length series."""
    xv, yv = as_values(x), as_values(y)
    if len(xv) != len(yv):
        raise LengthMismatch(f"length {len(xv)} vs {len(yv)}")
    diff = xv - yv
    return float(diff @ diff)
