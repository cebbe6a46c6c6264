"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
PASS/FAIL lines alongside the pytest output.
"""
import os
import time
from pathlib import Path

import numpy as np
import pytest

from ifrlag.domain import AntibodyAnchor
from ifrlag.fit import FitConfig, best_fit, closed_form_ifr
from ifrlag.infection import anchor_sum, calibrate_m, estimate_infections
from ifrlag.ingest import ColumnMapping, RepairPolicy, load_dataset
from ifrlag.intervals import IntervalConfig, fit_intervals
from ifrlag.lagmodel import (
    LagDistribution,
    shift_expectation,
    shift_expectation_elongated,
)
from ifrlag.synth import default_scenario, generate_deaths, generate_observables, two_peak_curve

MESH_STEP = 1e-5


def _report(num, name, ok, detail=""):
    suffix = f" ({detail})" if detail else ""
    print(f"\n[acceptance] criterion {num} ({name}): "
          f"{'PASS' if ok else 'FAIL'}{suffix}")


def _mesh_min_error(shifted, d, step=MESH_STEP, chunk=250_000):
    """Direct mesh search over r in [0, 2*max(d)/max(shifted)]."""
    r_hi = 2.0 * d.max() / shifted.max()
    mesh = np.arange(0.0, r_hi + step, step)
    best_err, best_r = np.inf, 0.0
    for lo in range(0, len(mesh), chunk):
        rs = mesh[lo : lo + chunk]
        errors = ((rs[:, None] * shifted[None, :] - d[None, :]) ** 2).sum(axis=1)
        idx = int(np.argmin(errors))
        if errors[idx] < best_err:
            best_err, best_r = float(errors[idx]), float(rs[idx])
    return best_r, best_err, r_hi


def _naive_shift(i, a, b):
    """Reference truncated shift: literal double loop over the pmf."""
    k = len(i)
    out = np.zeros(k)
    p = 1.0 / (b - a + 1)
    for j in range(k):
        acc = 0.0
        for w in range(j + 1):
            if a <= j - w <= b:
                acc += i[w] * p
        out[j] = acc
    return out


def test_criterion_1_closed_form_matches_mesh_search():
    rng = np.random.default_rng(11001)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(8, 61))
        i = rng.uniform(0.0, 100.0, k)
        d = rng.uniform(0.0, 5.0, k)
        a = int(rng.integers(0, 11))
        b = int(rng.integers(a, 11))
        shifted = shift_expectation(i, LagDistribution(a, b)).values
        r_mesh, _, r_hi = _mesh_min_error(shifted, d)
        r_closed = closed_form_ifr(shifted, d)
        assert 0.0 <= r_closed <= r_hi  # minimizer inside the mesh range
        worst = max(worst, abs(r_closed - r_mesh))
    elapsed = time.perf_counter() - start
    ok = worst <= MESH_STEP and elapsed < 10.0
    _report(1, "closed-form vs mesh oracle", ok,
            f"max |dr|={worst:.2e}, {elapsed:.1f}s")
    assert worst <= MESH_STEP
    assert elapsed < 10.0


def test_criterion_2_best_fit_matches_brute_force():
    rng = np.random.default_rng(22002)
    start = time.perf_counter()
    for _ in range(20):
        k = int(rng.integers(12, 41))
        max_lag = int(rng.integers(3, 11))
        i = rng.uniform(1.0, 50.0, k)
        a0 = int(rng.integers(0, max_lag + 1))
        b0 = int(rng.integers(a0, max_lag + 1))
        r0 = float(rng.uniform(0.002, 0.01))
        clean = r0 * _naive_shift(i, a0, b0)
        d = clean + rng.uniform(0.0, 0.05 * max(clean.max(), 1e-6), k)

        brute = None  # (error, a, b)
        curvature = 0.0
        for a in range(max_lag + 1):
            for b in range(a, max_lag + 1):
                shifted = _naive_shift(i, a, b)
                if shifted.max() == 0.0:
                    continue
                _, err, _ = _mesh_min_error(shifted, d)
                curvature = max(curvature, float(shifted @ shifted))
                if brute is None or err < brute[0]:
                    brute = (err, a, b)

        result = best_fit(i, d, FitConfig(max_lag=max_lag))
        mesh_slack = curvature * (MESH_STEP / 2) ** 2 + 1e-12
        assert (result.lag_a, result.lag_b) == (brute[1], brute[2])
        assert result.error <= brute[0] + 1e-12
        assert brute[0] - result.error <= mesh_slack
    elapsed = time.perf_counter() - start
    ok = elapsed < 30.0
    _report(2, "grid search vs brute force", ok, f"{elapsed:.1f}s")
    assert elapsed < 30.0


def test_criterion_3_shift_matches_unit_sampling():
    start = time.perf_counter()
    counts = np.rint(two_peak_curve(80, total=2e9)).astype(np.int64)
    k = len(counts)
    for seed, (a, b) in enumerate([(0, 0), (3, 13), (0, 50)]):
        lag = LagDistribution(a, b)
        expected = shift_expectation(counts.astype(float), lag).values
        rng = np.random.default_rng(33003 + seed)
        pmf = lag.pmf_vector()[a:]
        simulated = np.zeros(k)
        for day in range(k):
            if counts[day] == 0:
                continue
            draws = rng.multinomial(counts[day], pmf)
            hi = min(b - a, k - 1 - day - a)  # last in-range support offset
            if hi >= 0:
                simulated[day + a : day + a + hi + 1] += draws[: hi + 1]
        peak = expected.max()
        check = expected >= 0.01 * peak
        rel = np.abs(simulated[check] - expected[check]) / expected[check]
        assert rel.max() <= 0.005, f"Uniform({a},{b}): worst {rel.max():.4%}"
    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0
    _report(3, "shift vs Monte Carlo sampling", ok, f"{elapsed:.1f}s")
    assert elapsed < 60.0


def test_criterion_4_elongated_shift_conserves_mass():
    rng = np.random.default_rng(44004)
    worst = 0.0
    for _ in range(1000):
        k = int(rng.integers(1, 121))
        values = rng.uniform(0.0, 1e6, k)
        a = int(rng.integers(0, 51))
        b = int(rng.integers(a, 51))
        out = shift_expectation_elongated(values, LagDistribution(a, b)).values
        total = values.sum()
        worst = max(worst, abs(out.sum() - total) / max(total, 1.0))
    ok = worst <= 1e-9
    _report(4, "elongated shift mass conservation", ok, f"worst rel={worst:.2e}")
    assert worst <= 1e-9


def test_criterion_5_calibration_round_trip():
    anchor_day = 150
    worst = 0.0
    for m_true in (1.5, 2.2, 3.3, 4.2):
        scenario = default_scenario(m_true=m_true)
        dataset = generate_observables(scenario)
        target = float(scenario.infections.values[:anchor_day].sum())
        result = calibrate_m(dataset, AntibodyAnchor(anchor_day, target))
        worst = max(worst, abs(result.m - m_true))
        sums = [anchor_sum(dataset, m, anchor_day)
                for m in np.linspace(1.05, 30.0, 50)]
        assert all(x > y for x, y in zip(sums, sums[1:])), \
            f"anchor sum not strictly decreasing at m_true={m_true}"
    ok = worst <= 1e-4
    _report(5, "exponent calibration round trip", ok, f"worst |dm|={worst:.2e}")
    assert worst <= 1e-4


def test_criterion_6_noise_free_interval_recovery():
    ifrs = (0.0068, 0.0056, 0.0037, 0.0024, 0.0024)
    start = time.perf_counter()
    scenario = default_scenario(k=250, window=50, ifrs=ifrs,
                                lag=LagDistribution(4, 12))
    deaths = generate_deaths(scenario, "expected")
    report = fit_intervals(scenario.infections, deaths,
                           IntervalConfig(width=50))
    elapsed = time.perf_counter() - start

    assert len(report.windows) == 5
    worst = 0.0
    for window, ifr_true in zip(report.windows, ifrs):
        assert (window.fit.lag_a, window.fit.lag_b) == (4, 12), \
            f"window {window.start_day}: got ({window.fit.lag_a}, {window.fit.lag_b})"
        worst = max(worst, abs(window.fit.ifr - ifr_true) / ifr_true)
    ok = worst <= 1e-6 and elapsed < 10.0
    _report(6, "noise-free interval recovery", ok,
            f"worst rel={worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-6
    assert elapsed < 10.0


def test_criterion_7_sampled_noise_robustness():
    ifrs = (0.0068, 0.0056, 0.0037, 0.0024, 0.0024)
    scenario = default_scenario(k=250, window=50, ifrs=ifrs,
                                lag=LagDistribution(4, 12),
                                total_infections=1e8, population=500_000_000)
    iv = scenario.infections.values
    regime_mass = [iv[r.start_day - 1 : r.end_day].sum()
                   for r in scenario.regimes]
    assert min(regime_mass) >= 1e6  # every regime at the required scale

    successes = 0
    for seed in range(20):
        deaths = generate_deaths(scenario, "sampled", seed=seed)
        report = fit_intervals(iv, deaths.values, IntervalConfig(width=50))
        rel = [abs(w.fit.ifr - ifr) / ifr
               for w, ifr in zip(report.windows, ifrs)]
        if max(rel) <= 0.05:
            successes += 1
    ok = successes >= 18
    _report(7, "sampled-noise robustness", ok, f"{successes}/20 seeds within 5%")
    assert successes >= 18


def _find_snapshot():
    candidates = [os.environ.get("IFRLAG_OWID_SNAPSHOT", "")]
    here = Path(__file__).resolve().parent
    candidates += [
        str(here / "data" / "owid-covid-data.csv"),
        str(here.parent / "data" / "owid-covid-data.csv"),
    ]
    for c in candidates:
        if c and Path(c).is_file():
            return Path(c)
    return None


def test_criterion_8_historical_snapshot_reproduction():
    """Best effort, snapshot dependent: needs an archived OWID file covering
    2020-03-01..2020-11-06. Historical feeds have been revised, so this runs
    only when such a snapshot is supplied (IFRLAG_OWID_SNAPSHOT or
    tests/data/owid-covid-data.csv)."""
    snapshot = _find_snapshot()
    if snapshot is None:
        _report(8, "historical US reproduction", True,
                "SKIPPED: no archived snapshot supplied")
        pytest.skip("no OWID snapshot available")

    import csv as _csv
    import datetime as dt
    import io

    with open(snapshot, newline="", encoding="utf-8") as fh:
        reader = _csv.DictReader(fh)
        buf = io.StringIO()
        writer = _csv.DictWriter(
            buf, fieldnames=["date", "new_cases", "new_deaths", "new_tests"])
        writer.writeheader()
        for row in reader:
            if row.get("location") == "United States":
                writer.writerow({f: row.get(f, "") for f in
                                 ("date", "new_cases", "new_deaths",
                                  "new_tests")})

    dataset, _ = load_dataset(
        buf.getvalue().encode(),
        ColumnMapping("date", "new_cases", "new_deaths", "new_tests"),
        RepairPolicy(),
        population=382_000_000,
        date_range=(dt.date(2020, 3, 1), dt.date(2020, 11, 5)),
        label="United States",
    )
    anchor_day = dataset.cases.day_index(dt.date(2020, 7, 31))
    anchor = AntibodyAnchor(anchor_day, 0.09 * 382_000_000)
    calibration = calibrate_m(dataset, anchor)
    infections = estimate_infections(dataset, calibration.m)
    report = fit_intervals(infections, dataset.deaths, IntervalConfig(width=50))

    first, last = report.windows[0].fit.ifr, report.windows[-1].fit.ifr
    ok = (abs(calibration.m - 3.3) <= 0.2
          and abs(first - 0.0068) <= 0.001
          and abs(last - 0.0024) <= 0.001)
    _report(8, "historical US reproduction", ok,
            f"m={calibration.m:.2f}, first={first:.2%}, last={last:.2%}")
    assert abs(calibration.m - 3.3) <= 0.2
    assert abs(first - 0.0068) <= 0.001
    assert abs(last - 0.0024) <= 0.001
