"""Time-varying estimation over consecutive windows with residual carryover.

Deaths observed in a window come from two sources: infections inside the
window ("current" deaths) and late deaths of infections from the previous
window ("residual" deaths). Windows are processed left to right; each
window's fit runs on its deaths minus the incoming residuals, and its own
outgoing residuals (the elongated-shift tail past the window end, scaled by
the fitted rate) are handed to the next window. Lags are capped at width-1
so residuals never span more than one window boundary.

The first window necessarily attributes every death to its own infections,
which tends to overestimate its rate; it is flagged rather than corrected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import FitResult, as_values
from .errors import FitError, ZeroInfectionWindow
from .fit import FitConfig, best_fit
from .lagmodel import LagDistribution, shift_expectation_elongated

FLAT_DEATHS_VARIANCE_RATIO = 1e-3

WARN_FIRST_WINDOW = "first_window_edge_effect"
WARN_NEGATIVE_ADJUSTED = "negative_adjusted_deaths"
WARN_NEGATIVE_IFR = "negative_ifr"
WARN_FLAT_DEATHS = "flat_deaths_window"
WARN_RESIDUAL_OVERFLOW = "residual_overflow_dropped"
WARN_TRAILING_DROPPED = "trailing_window_dropped"


@dataclass(frozen=True)
class IntervalConfig:
    """Window width and handling of the leftover tail.

    Trailing remainders shorter than min_trailing days are dropped (too few
    days to support a lag grid); longer remainders are fitted like any other
    window. max_lag, when set, further caps the per-window grid below the
    structural bound width - 1.
    """

    width: int = 50
    min_trailing: int = 10
    max_lag: int | None = None
    allow_zero_ifr: bool = True

    def __post_init__(self):
        if self.width < 2:
            raise ValueError(f"window width must be >= 2, got {self.width}")
        if self.min_trailing < 1:
            raise ValueError("min_trailing must be >= 1")

    @property
    def effective_max_lag(self) -> int:
        cap = self.width - 1
        if self.max_lag is not None:
            cap = min(cap, self.max_lag)
        return cap


@dataclass(frozen=True)
class WindowResult:
    """One window's fit plus its residual bookkeeping trace."""

    start_day: int  # 1-based, inclusive
    end_day: int  # 1-based, inclusive
    fit: FitResult
    residual_out: np.ndarray
    adjusted_deaths: np.ndarray
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class IntervalReport:
    """Ordered per-window results over contiguous, non-overlapping windows."""

    windows: tuple[WindowResult, ...]
    candidate_deaths: np.ndarray
    warnings: tuple[str, ...] = ()

    def to_rows(self) -> list[dict]:
        return [
            {
                "start_day": w.start_day,
                "end_day": w.end_day,
                "lag_a": w.fit.lag_a,
                "lag_b": w.fit.lag_b,
                "ifr": w.fit.ifr,
                "error": w.fit.error,
                "warnings": list(w.warnings),
            }
            for w in self.windows
        ]


def compute_residuals(i_window, fit: FitResult) -> np.ndarray:
    """Deaths predicted after the window end: the scaled elongated-shift tail.

    Length is exactly fit.lag_b (zero-length when lag_b = 0); entries are
    non-negative whenever the fitted rate is.
    """
    iv = as_values(i_window)
    lag = LagDistribution(fit.lag_a, fit.lag_b)
    full = shift_expectation_elongated(iv, lag).values
    return fit.ifr * full[len(iv) :]


def _is_flat(deaths: np.ndarray) -> bool:
    mean = float(deaths.mean())
    var = float(deaths.var())
    return var == 0.0 or var < FLAT_DEATHS_VARIANCE_RATIO * mean * mean


def fit_intervals(i, d, config: IntervalConfig = IntervalConfig()) -> IntervalReport:
    """Windowed fit with left-to-right residual-death carryover.

    Each window: subtract the previous window's residuals from its raw
    deaths, fit lag and rate on the adjusted deaths, then emit its own
    residuals. Negative adjusted deaths are passed through unclamped (least
    squares tolerates them; clamping would bias the rate upward) and
    flagged, as are negative fitted rates and near-flat death windows where
    the lag is poorly identified.
    """
    iv = as_values(i)
    dv = as_values(d)
    if len(iv) != len(dv):
        raise FitError(f"infections length {len(iv)} != deaths length {len(dv)}")
    k, w = len(iv), config.width

    starts = list(range(0, k, w))
    report_warnings: list[str] = []
    tail_days = k - starts[-1]
    if tail_days < w and tail_days < config.min_trailing:
        dropped = starts.pop()
        report_warnings.append(
            f"{WARN_TRAILING_DROPPED}: days {dropped + 1}..{k} "
            f"({tail_days} < {config.min_trailing})"
        )
    if not starts:
        raise FitError(f"series of length {k} leaves no fittable window")

    fit_config = FitConfig(
        max_lag=config.effective_max_lag, allow_zero_ifr=config.allow_zero_ifr
    )
    candidate = np.zeros(k)
    residual_in = np.zeros(0)
    windows: list[WindowResult] = []
    for n, s in enumerate(starts, start=1):
        e = min(s + w, k)
        i_win = iv[s:e]
        warnings: list[str] = []
        if n == 1:
            warnings.append(WARN_FIRST_WINDOW)

        adjusted = dv[s:e].copy()
        n_sub = min(len(residual_in), len(adjusted))
        adjusted[:n_sub] -= residual_in[:n_sub]
        if n_sub < len(residual_in):
            warnings.append(WARN_RESIDUAL_OVERFLOW)
        if np.any(adjusted < 0):
            warnings.append(WARN_NEGATIVE_ADJUSTED)
        if _is_flat(adjusted):
            warnings.append(WARN_FLAT_DEATHS)

        if not np.any(i_win > 0):
            raise ZeroInfectionWindow(
                f"window {n} (days {s + 1}..{e}) has no positive infections"
            )
        try:
            fit = best_fit(i_win, adjusted, fit_config)
        except FitError as exc:
            raise type(exc)(f"window {n} (days {s + 1}..{e}): {exc}") from exc
        if fit.ifr < 0:
            warnings.append(WARN_NEGATIVE_IFR)

        full = fit.ifr * shift_expectation_elongated(
            i_win, LagDistribution(fit.lag_a, fit.lag_b)
        ).values
        residual_out = full[len(i_win) :]
        candidate[s:e] += full[: len(i_win)]
        candidate[s : s + n_sub] += residual_in[:n_sub]

        windows.append(
            WindowResult(
                start_day=s + 1,
                end_day=e,
                fit=fit,
                residual_out=residual_out,
                adjusted_deaths=adjusted,
                warnings=tuple(warnings),
            )
        )
        residual_in = residual_out

    # A dropped tail still receives the last window's predicted residuals.
    last_end = windows[-1].end_day
    if last_end < k:
        n_tail = min(len(residual_in), k - last_end)
        candidate[last_end : last_end + n_tail] += residual_in[:n_tail]

    return IntervalReport(
        windows=tuple(windows),
        candidate_deaths=candidate,
        warnings=tuple(report_warnings),
    )
