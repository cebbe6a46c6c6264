"""Least-squares fit of a lag-shifted, scaled infection series to deaths.

For a fixed lag law the best vertical scaling has a closed form: the error
sum_j (r * i'_j - d_j)^2 is quadratic in r with unique minimizer
r = (i' . d) / ||i'||^2. The lag parameters themselves are found by
exhaustive search over every integer pair a <= b <= max_lag.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import FitResult, as_values
from .errors import LengthMismatch, ZeroInfectionSeries, ZeroShiftedSeries
from .lagmodel import LagDistribution, ShiftedSeries, shift_expectation


@dataclass(frozen=True)
class FitConfig:
    """Grid bounds for the lag search.

    allow_zero_ifr=False skips grid pairs whose closed-form scaling is
    not strictly positive.
    """

    max_lag: int = 50
    allow_zero_ifr: bool = True

    def __post_init__(self):
        if self.max_lag < 0:
            raise ValueError(f"max_lag must be >= 0, got {self.max_lag}")


def closed_form_ifr(shifted, d) -> float:
    """Unique minimizer r of sum((r * shifted - d)^2).

    Unconstrained: the result may be negative or exceed 1 if the data
    demand it; callers interpret.
    """
    ip = as_values(shifted)
    dv = as_values(d)
    if len(ip) != len(dv):
        raise LengthMismatch(f"length {len(ip)} vs {len(dv)}")
    denom = float(ip @ ip)
    if denom == 0.0:
        raise ZeroShiftedSeries("shifted series is identically zero")
    return float(ip @ dv) / denom


def best_fit(i, d, config: FitConfig = FitConfig()) -> FitResult:
    """Exhaustive search over Uniform(a, b) lags, a <= b <= max_lag.

    For each pair the scaling is the closed-form minimizer and the error is
    the squared distance of the scaled truncated shift to d. Ties are broken
    by strict improvement only, so the first pair visited in lexicographic
    (a, b) order wins. Pairs whose shift is identically zero inside the
    window (all mass pushed past the end) are skipped.
    """
    iv = as_values(i)
    dv = as_values(d)
    if len(iv) != len(dv):
        raise LengthMismatch(f"length {len(iv)} vs {len(dv)}")
    if len(iv) < 1:
        raise LengthMismatch("empty series")
    if not np.any(iv > 0):
        raise ZeroInfectionSeries("infection series has no positive entry")

    best: FitResult | None = None
    for a in range(config.max_lag + 1):
        for b in range(a, config.max_lag + 1):
            ip = shift_expectation(iv, LagDistribution(a, b)).values
            denom = float(ip @ ip)
            if denom == 0.0:
                continue
            r = float(ip @ dv) / denom
            if not config.allow_zero_ifr and r <= 0.0:
                continue
            resid = r * ip - dv
            m = float(resid @ resid)
            if best is None or m < best.error:
                best = FitResult(lag_a=a, lag_b=b, ifr=r, error=m)
    if best is None:
        raise ZeroShiftedSeries(
            "every lag pair leaves the shifted series identically zero"
        )
    return best


def candidate_deaths(i, fit: FitResult) -> ShiftedSeries:
    """Scaled truncated shift for a finished fit: the fitted death sequence."""
    shifted = shift_expectation(as_values(i), LagDistribution(fit.lag_a, fit.lag_b))
    return ShiftedSeries(
        fit.ifr * shifted.values, elongated=False, source_length=shifted.source_length
    )
