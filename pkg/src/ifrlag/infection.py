"""Back-estimation of daily infections from cases and tests.

Reported cases undercount infections, and the shortfall depends on how much
testing happened that day. The estimator inflates each day's cases by a
power of the test coverage:

    infections[j] = cases[j] / (tests[j] / N) ** (1/m)

with m > 1. When nearly everyone is tested (tests/N near 1) cases approach
infections; when testing is scarce the inflation is large. The exponent m is
the single free parameter and is calibrated so that cumulative estimated
infections through one serology-study day match the study's count, by
bisection (the cumulative sum is strictly decreasing in m whenever any case
day had partial test coverage).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import AntibodyAnchor, DailySeries, Dataset
from .errors import (
    CalibrationFailed,
    DegenerateSeries,
    DomainError,
    InfeasibleAnchorHigh,
    InfeasibleAnchorLow,
)

M_LO_DEFAULT = 1.0 + 1e-9
M_HI_DEFAULT = 100.0
SUM_TOLERANCE = 1e-6
M_BRACKET_TOLERANCE = 1e-9
MAX_ITERATIONS = 200


@dataclass(frozen=True)
class CalibrationResult:
    """Calibrated exponent m and the anchor sum it achieves."""

    m: float
    achieved_sum: float
    anchor: AntibodyAnchor
    iterations: int


def _infections_values(cases: np.ndarray, tests: np.ndarray, population: int,
                       m: float) -> np.ndarray:
    if m <= 1.0:
        raise DomainError(f"exponent m must be > 1, got {m}")
    positive = cases > 0
    if np.any(tests[positive] <= 0):
        day = int(np.flatnonzero(positive & (tests <= 0))[0]) + 1
        raise DomainError(f"positive cases with zero tests at day {day}")
    out = np.zeros_like(cases)
    coverage = tests[positive] / float(population)
    out[positive] = cases[positive] / coverage ** (1.0 / m)
    return out


def estimate_infections(dataset: Dataset, m: float) -> DailySeries:
    """Per-day infection estimates at exponent m.

    Days with zero cases yield zero infections regardless of tests (avoids
    0/0); estimates dominate cases elementwise since tests <= N.
    """
    values = _infections_values(
        dataset.cases.values, dataset.tests.values, dataset.population, m
    )
    return DailySeries(dataset.cases.origin_day, values)


def anchor_sum(dataset: Dataset, m: float, day_index: int) -> float:
    """Cumulative estimated infections through the given 1-based day."""
    if not 1 <= day_index <= len(dataset):
        raise DomainError(f"day index {day_index} outside [1, {len(dataset)}]")
    values = _infections_values(
        dataset.cases.values[:day_index],
        dataset.tests.values[:day_index],
        dataset.population,
        m,
    )
    return float(values.sum())


def calibrate_m(
    dataset: Dataset,
    anchor: AntibodyAnchor,
    m_lo: float = M_LO_DEFAULT,
    m_hi: float = M_HI_DEFAULT,
) -> CalibrationResult:
    """Bisect for the m whose anchor sum matches the serology count.

    Converges when the achieved sum is within 1e-6 relative of the anchor
    and the m bracket has collapsed below 1e-9 (the sum tolerance alone can
    stop early on weakly m-sensitive series). Deterministic.
    """
    ell, target = anchor.day_index, anchor.infected_count
    if ell > len(dataset):
        raise DomainError(f"anchor day {ell} past end of dataset ({len(dataset)})")

    cases_through = float(dataset.cases.values[:ell].sum())
    if target <= cases_through:
        raise InfeasibleAnchorLow(
            f"anchor {target:g} <= cumulative cases {cases_through:g} through day "
            f"{ell}; estimated infections can never be fewer than cases"
        )

    sum_lo = anchor_sum(dataset, m_lo, ell)
    sum_hi = anchor_sum(dataset, m_hi, ell)
    if abs(sum_lo - sum_hi) <= 1e-12 * max(sum_lo, 1.0):
        raise DegenerateSeries(
            "anchor sum does not vary with m (full test coverage on all case days)"
        )
    if target > sum_lo * (1.0 + SUM_TOLERANCE):
        raise InfeasibleAnchorHigh(
            f"anchor {target:g} exceeds maximum attainable sum {sum_lo:g} at m={m_lo}"
        )
    if target < sum_hi * (1.0 - SUM_TOLERANCE):
        raise InfeasibleAnchorLow(
            f"anchor {target:g} below attainable sum {sum_hi:g} at m={m_hi}; "
            f"no m <= {m_hi} reaches it"
        )

    lo, hi = m_lo, m_hi
    for iteration in range(1, MAX_ITERATIONS + 1):
        mid = 0.5 * (lo + hi)
        achieved = anchor_sum(dataset, mid, ell)
        if (
            abs(achieved - target) <= SUM_TOLERANCE * target
            and hi - lo <= M_BRACKET_TOLERANCE
        ):
            return CalibrationResult(mid, achieved, anchor, iteration)
        if achieved > target:
            lo = mid  # sum decreasing in m: root is to the right
        else:
            hi = mid
    raise CalibrationFailed(
        f"bisection did not reach tolerance after {MAX_ITERATIONS} iterations"
    )
