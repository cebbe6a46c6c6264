"""Ground-truth scenario generation for round-trip validation.

A scenario fixes the true daily infections, a piecewise-constant fatality
rate and lag law, a test curve and the true case-ascertainment exponent.
From it we can generate the observable dataset (cases via the inverted
coverage relation, deaths by expectation or by per-infection sampling) and
check that every estimator recovers the planted truth.

Sampling uses numpy's PCG64 generator, so identical seeds reproduce
identical output across platforms.
"""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass

import numpy as np

from .domain import DailySeries, Dataset, validate_dataset
from .errors import DomainError
from .lagmodel import LagDistribution, shift_expectation_elongated

DEFAULT_ORIGIN = dt.date(2020, 3, 1)


@dataclass(frozen=True)
class Regime:
    """Constant fatality rate and lag law over days [start_day, end_day]."""

    start_day: int  # 1-based, inclusive
    end_day: int  # 1-based, inclusive
    ifr: float
    lag: LagDistribution

    def __post_init__(self):
        if not 1 <= self.start_day <= self.end_day:
            raise DomainError(
                f"bad regime bounds [{self.start_day}, {self.end_day}]"
            )
        if not 0.0 <= self.ifr <= 1.0:
            raise DomainError(f"regime ifr {self.ifr} outside [0, 1]")


@dataclass(frozen=True)
class Scenario:
    infections: DailySeries
    regimes: tuple[Regime, ...]
    population: int
    test_curve: DailySeries
    m_true: float
    label: str = "synthetic"

    def __post_init__(self):
        k = len(self.infections)
        if len(self.test_curve) != k:
            raise DomainError("test curve length differs from infections")
        object.__setattr__(self, "regimes", tuple(self.regimes))
        expected_start = 1
        for r in self.regimes:
            if r.start_day != expected_start:
                raise DomainError(
                    f"regimes must tile the period: gap/overlap at day {r.start_day}"
                )
            expected_start = r.end_day + 1
        if expected_start != k + 1:
            raise DomainError(f"regimes end at day {expected_start - 1}, need {k}")
        t = self.test_curve.values
        if np.any(t <= 0) or np.any(t > self.population):
            raise DomainError("test curve must lie in (0, population]")
        if self.m_true <= 1.0:
            raise DomainError(f"m_true must be > 1, got {self.m_true}")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "origin_day": self.infections.origin_day.isoformat(),
            "population": self.population,
            "m_true": self.m_true,
            "infections": self.infections.values.tolist(),
            "test_curve": self.test_curve.values.tolist(),
            "regimes": [
                {
                    "start_day": r.start_day,
                    "end_day": r.end_day,
                    "ifr": r.ifr,
                    "lag": {"kind": r.lag.kind, "a": r.lag.a, "b": r.lag.b},
                }
                for r in self.regimes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        origin = dt.date.fromisoformat(data["origin_day"])
        return cls(
            infections=DailySeries(origin, np.asarray(data["infections"], float)),
            regimes=tuple(
                Regime(
                    start_day=int(r["start_day"]),
                    end_day=int(r["end_day"]),
                    ifr=float(r["ifr"]),
                    lag=LagDistribution(
                        int(r["lag"]["a"]), int(r["lag"]["b"]),
                        kind=r["lag"].get("kind", "uniform"),
                    ),
                )
                for r in data["regimes"]
            ),
            population=int(data["population"]),
            test_curve=DailySeries(origin, np.asarray(data["test_curve"], float)),
            m_true=float(data["m_true"]),
            label=data.get("label", "synthetic"),
        )

    @classmethod
    def from_json(cls, path) -> "Scenario":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def two_peak_curve(k: int, total: float, peaks=(0.18, 0.66),
                   widths=(0.10, 0.14), mix=(0.45, 0.55)) -> np.ndarray:
    """Smooth two-peak daily curve with the given total mass.

    Peak positions and widths are fractions of the period length. The
    defaults put substantial mass in every fifth of the period, so each
    window of a five-window split carries a statistically useful signal.
    Any non-negative series works.
    """
    days = np.arange(k, dtype=float)
    curve = np.zeros(k)
    for pos, width, weight in zip(peaks, widths, mix):
        center, sigma = pos * k, max(width * k, 1.0)
        curve += weight * np.exp(-0.5 * ((days - center) / sigma) ** 2)
    return total * curve / curve.sum()


def ramp_test_curve(k: int, population: int, start_frac: float = 0.0004,
                    end_frac: float = 0.012) -> np.ndarray:
    """Daily tests ramping up over the period, like real test capacity did."""
    frac = np.geomspace(start_frac, end_frac, k)
    return np.clip(frac * population, 1.0, float(population))


def default_scenario(
    k: int = 250,
    window: int = 50,
    ifrs=(0.0068, 0.0056, 0.0037, 0.0024, 0.0024),
    lag: LagDistribution = LagDistribution(4, 12),
    population: int = 50_000_000,
    total_infections: float = 5e6,
    m_true: float = 3.3,
    origin: dt.date = DEFAULT_ORIGIN,
) -> Scenario:
    """Two-peak scenario with one fatality regime per window."""
    n_regimes = (k + window - 1) // window
    if len(ifrs) != n_regimes:
        raise DomainError(f"need {n_regimes} regime rates for k={k}, w={window}")
    regimes = tuple(
        Regime(
            start_day=n * window + 1,
            end_day=min((n + 1) * window, k),
            ifr=float(ifrs[n]),
            lag=lag,
        )
        for n in range(n_regimes)
    )
    return Scenario(
        infections=DailySeries(origin, two_peak_curve(k, total_infections)),
        regimes=regimes,
        population=population,
        test_curve=DailySeries(origin, ramp_test_curve(k, population)),
        m_true=m_true,
    )


def generate_deaths(scenario: Scenario, mode: str = "expected",
                    seed: int = 0) -> DailySeries:
    """Daily deaths implied by the scenario, truncated to the period.

    expected: per-regime elongated expectation shift scaled by the regime
    rate, regimes summed. sampled: infections are rounded to integers, each
    draws a Bernoulli(ifr) death and each death an integer lag from the
    regime's law; deterministic per seed (PCG64).
    """
    k = len(scenario.infections)
    iv = scenario.infections.values
    out = np.zeros(k)
    if mode == "expected":
        for r in scenario.regimes:
            s, e = r.start_day - 1, r.end_day
            full = r.ifr * shift_expectation_elongated(iv[s:e], r.lag).values
            keep = min(len(full), k - s)
            out[s : s + keep] += full[:keep]
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        counts = np.rint(iv).astype(np.int64)
        for r in scenario.regimes:
            for day in range(r.start_day - 1, r.end_day):
                n = int(counts[day])
                if n == 0:
                    continue
                n_deaths = int(rng.binomial(n, r.ifr))
                if n_deaths == 0:
                    continue
                lags = rng.integers(r.lag.a, r.lag.b + 1, size=n_deaths)
                landed = day + lags
                landed = landed[landed < k]  # deaths past the period are unobserved
                np.add.at(out, landed, 1.0)
    else:
        raise DomainError(f"unknown mode {mode!r}; use 'expected' or 'sampled'")
    return DailySeries(scenario.infections.origin_day, out)


def generate_observables(scenario: Scenario, mode: str = "expected",
                         seed: int = 0) -> Dataset:
    """Observable dataset consistent with the scenario's ground truth.

    Cases invert the coverage relation at m_true:
    cases[j] = infections[j] * (tests[j]/N) ** (1/m_true), so estimating
    infections back at m_true reproduces the truth exactly.
    """
    iv = scenario.infections.values
    coverage = scenario.test_curve.values / float(scenario.population)
    cases = iv * coverage ** (1.0 / scenario.m_true)
    origin = scenario.infections.origin_day
    ds = Dataset(
        cases=DailySeries(origin, cases),
        deaths=generate_deaths(scenario, mode=mode, seed=seed),
        tests=scenario.test_curve,
        population=scenario.population,
        label=scenario.label,
    )
    return validate_dataset(ds)
