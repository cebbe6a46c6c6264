"""Command-line surface: calibrate, fit, fit-intervals, estimate-infections,
simulate.

Every command takes a JSON run configuration (paths inside it resolve
relative to the config file) and writes its artifacts into the configured
output directory. Outputs are deterministic for identical inputs, config
and seed.

Exit codes: 0 success (warnings allowed), 2 input/validation error,
3 infeasible calibration, 4 fit failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as dt
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .domain import AntibodyAnchor, Dataset, anchor_from_study
from .errors import CalibrationError, ConfigError, DataError, FitError
from .fit import FitConfig, best_fit
from .infection import CalibrationResult, calibrate_m, estimate_infections
from .ingest import ColumnMapping, RepairPolicy, load_dataset, write_dataset_csv
from .intervals import IntervalConfig, IntervalReport, fit_intervals
from .svgchart import line_chart
from .synth import Scenario, generate_observables

EXIT_OK = 0
EXIT_DATA = 2
EXIT_CALIBRATION = 3
EXIT_FIT = 4


@dataclass(frozen=True)
class RunConfig:
    label: str
    csv_path: Path
    mapping: ColumnMapping
    policy: RepairPolicy
    population: int
    anchor_date: dt.date
    anchor_fraction: float | None
    anchor_count: float | None
    date_start: dt.date
    date_end: dt.date
    interval_width: int
    min_trailing: int
    max_lag: int
    output_dir: Path

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        base = path.parent
        try:
            ds = data["dataset"]
            cols = ds.get("columns", {})
            repair = ds.get("repair", {})
            anchor = data["anchor"]
            rng = data["date_range"]
            intervals = data.get("intervals", {})
            cfg = cls(
                label=data.get("label", path.stem),
                csv_path=(base / ds["path"]).resolve(),
                mapping=ColumnMapping(
                    date_column=cols.get("date", "date"),
                    cases_column=cols.get("cases", "cases"),
                    deaths_column=cols.get("deaths", "deaths"),
                    tests_column=cols.get("tests", "tests"),
                ),
                policy=RepairPolicy(
                    test_gap_fill=repair.get("test_gap_fill", "interpolate"),
                    negative_value=repair.get("negative_value", "reject"),
                    case_exceeds_test=repair.get("case_exceeds_test", "raise_tests"),
                ),
                population=int(data["population"]),
                anchor_date=dt.date.fromisoformat(anchor["date"]),
                anchor_fraction=(
                    float(anchor["fraction"]) if "fraction" in anchor else None
                ),
                anchor_count=float(anchor["count"]) if "count" in anchor else None,
                date_start=dt.date.fromisoformat(rng["start"]),
                date_end=dt.date.fromisoformat(rng["end"]),
                interval_width=int(intervals.get("width", 50)),
                min_trailing=int(intervals.get("min_trailing", 10)),
                max_lag=int(data.get("max_lag", 50)),
                output_dir=(base / data.get("output_dir", "out")).resolve(),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad config {path}: {exc}") from exc
        if not cfg.csv_path.exists():
            raise ConfigError(f"dataset file not found: {cfg.csv_path}")
        if not cfg.date_start <= cfg.anchor_date <= cfg.date_end:
            raise ConfigError(
                f"anchor date {cfg.anchor_date} outside range "
                f"[{cfg.date_start}, {cfg.date_end}]"
            )
        if (cfg.anchor_fraction is None) == (cfg.anchor_count is None):
            raise ConfigError("anchor needs exactly one of fraction or count")
        return cfg

    def echo(self) -> dict:
        return {
            "label": self.label,
            "dataset": {
                "path": str(self.csv_path),
                "columns": {
                    "date": self.mapping.date_column,
                    "cases": self.mapping.cases_column,
                    "deaths": self.mapping.deaths_column,
                    "tests": self.mapping.tests_column,
                },
                "repair": {
                    "test_gap_fill": self.policy.test_gap_fill,
                    "negative_value": self.policy.negative_value,
                    "case_exceeds_test": self.policy.case_exceeds_test,
                },
            },
            "population": self.population,
            "anchor": {
                "date": self.anchor_date.isoformat(),
                "fraction": self.anchor_fraction,
                "count": self.anchor_count,
            },
            "date_range": {
                "start": self.date_start.isoformat(),
                "end": self.date_end.isoformat(),
            },
            "intervals": {
                "width": self.interval_width,
                "min_trailing": self.min_trailing,
            },
            "max_lag": self.max_lag,
        }


def _load(config: RunConfig):
    raw = config.csv_path.read_bytes()
    dataset, repairs = load_dataset(
        raw,
        config.mapping,
        config.policy,
        config.population,
        (config.date_start, config.date_end),
        label=config.label,
    )
    checksum = hashlib.sha256(raw).hexdigest()
    return dataset, repairs, checksum


def _anchor(config: RunConfig, dataset: Dataset) -> AntibodyAnchor:
    return anchor_from_study(
        dataset,
        config.anchor_date,
        fraction=config.anchor_fraction,
        count=config.anchor_count,
    )


def _provenance(config: RunConfig, checksum: str) -> dict:
    return {
        "tool": "ifrlag",
        "version": __version__,
        "dataset_sha256": checksum,
    }


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _write_repair_log(path: Path, repairs) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(e.to_json() + "\n" for e in repairs), encoding="utf-8")


def cmd_calibrate(config: RunConfig) -> CalibrationResult:
    dataset, repairs, checksum = _load(config)
    result = calibrate_m(dataset, _anchor(config, dataset))
    out = config.output_dir
    _write_repair_log(out / "repairs.jsonl", repairs)
    _write_json(
        out / "calibration.json",
        {
            "config": config.echo(),
            "calibration": {
                "m": result.m,
                "achieved_sum": result.achieved_sum,
                "anchor_day": result.anchor.day_index,
                "anchor_count": result.anchor.infected_count,
                "iterations": result.iterations,
            },
            "provenance": _provenance(config, checksum),
        },
    )
    print(f"{config.label}: m = {result.m:.4f} "
          f"(anchor sum {result.achieved_sum:,.0f} at day {result.anchor.day_index},"
          f" {result.iterations} iterations)")
    return result


def cmd_fit(config: RunConfig) -> None:
    dataset, repairs, checksum = _load(config)
    calibration = calibrate_m(dataset, _anchor(config, dataset))
    infections = estimate_infections(dataset, calibration.m)
    fit = best_fit(infections, dataset.deaths, FitConfig(max_lag=config.max_lag))
    out = config.output_dir
    _write_repair_log(out / "repairs.jsonl", repairs)
    _write_json(
        out / "fit.json",
        {
            "config": config.echo(),
            "calibration": {"m": calibration.m,
                            "achieved_sum": calibration.achieved_sum},
            "fit": {
                "lag_a": fit.lag_a,
                "lag_b": fit.lag_b,
                "mean_lag": fit.mean_lag,
                "ifr": fit.ifr,
                "error": fit.error,
            },
            "provenance": _provenance(config, checksum),
        },
    )
    print(f"{config.label}: lag Uniform({fit.lag_a},{fit.lag_b}) "
          f"mean {fit.mean_lag:.1f} d, IFR {fit.ifr * 100:.3f}%, "
          f"error {fit.error:,.1f}")


def _write_charts(out: Path, dataset: Dataset, infections, report: IntervalReport
                  ) -> None:
    boundaries = tuple(w.end_day for w in report.windows[:-1])
    charts = {
        "infections.svg": line_chart(
            f"{dataset.label}: reported cases vs estimated infections",
            [("cases", dataset.cases.values),
             ("estimated infections", infections.values)],
            y_label="people per day",
        ),
        "tests.svg": line_chart(
            f"{dataset.label}: daily tests",
            [("tests", dataset.tests.values)],
            y_label="tests per day",
        ),
        "deaths_fit.svg": line_chart(
            f"{dataset.label}: reported vs fitted deaths",
            [("reported deaths", dataset.deaths.values),
             ("fitted deaths", report.candidate_deaths)],
            y_label="deaths per day",
            day_markers=boundaries,
        ),
    }
    for name, svg in charts.items():
        (out / name).write_text(svg, encoding="utf-8")


def _write_intervals_csv(path: Path, report: IntervalReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["start_day", "end_day", "lag_a", "lag_b", "ifr", "error", "warnings"]
        )
        for row in report.to_rows():
            writer.writerow(
                [row["start_day"], row["end_day"], row["lag_a"], row["lag_b"],
                 f"{row['ifr']:.10g}", f"{row['error']:.10g}",
                 ";".join(row["warnings"])]
            )


def cmd_fit_intervals(config: RunConfig) -> IntervalReport:
    dataset, repairs, checksum = _load(config)
    calibration = calibrate_m(dataset, _anchor(config, dataset))
    infections = estimate_infections(dataset, calibration.m)
    report = fit_intervals(
        infections,
        dataset.deaths,
        IntervalConfig(
            width=config.interval_width,
            min_trailing=config.min_trailing,
            max_lag=config.max_lag,
        ),
    )
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    _write_repair_log(out / "repairs.jsonl", repairs)
    _write_json(
        out / "report.json",
        {
            "config": config.echo(),
            "calibration": {"m": calibration.m,
                            "achieved_sum": calibration.achieved_sum},
            "windows": report.to_rows(),
            "series": {
                "cases": dataset.cases.values.tolist(),
                "tests": dataset.tests.values.tolist(),
                "infections": infections.values.tolist(),
                "deaths": dataset.deaths.values.tolist(),
                "candidate_deaths": report.candidate_deaths.tolist(),
            },
            "report_warnings": list(report.warnings),
            "provenance": _provenance(config, checksum),
        },
    )
    _write_intervals_csv(out / "intervals.csv", report)
    _write_charts(out, dataset, infections, report)

    print(f"{config.label}: m = {calibration.m:.4f}")
    print(f"{'days':>12}  {'lag':>10}  {'IFR':>8}  {'error':>12}  warnings")
    for w in report.windows:
        days = f"{w.start_day}..{w.end_day}"
        lag = f"U({w.fit.lag_a},{w.fit.lag_b})"
        print(f"{days:>12}  {lag:>10}  {w.fit.ifr * 100:7.3f}%  "
              f"{w.fit.error:12.4g}  {';'.join(w.warnings)}")
    for warning in report.warnings:
        print(f"note: {warning}")
    return report


def cmd_estimate_infections(config: RunConfig, m: float) -> None:
    dataset, repairs, checksum = _load(config)
    infections = estimate_infections(dataset, m)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    _write_repair_log(out / "repairs.jsonl", repairs)
    with open(out / "infections.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "date", "cases", "tests", "infections"])
        for j in range(len(dataset)):
            writer.writerow(
                [j + 1, dataset.cases.date_of(j + 1).isoformat(),
                 f"{dataset.cases.values[j]:.0f}",
                 f"{dataset.tests.values[j]:.0f}",
                 f"{infections.values[j]:.6f}"]
            )
    total_c, total_i = dataset.cases.values.sum(), infections.values.sum()
    print(f"{config.label}: m = {m:g}, total cases {total_c:,.0f}, "
          f"estimated infections {total_i:,.0f} (x{total_i / max(total_c, 1):.2f})")


def cmd_simulate(scenario_path, output_dir, seed: int, mode: str) -> None:
    try:
        scenario = Scenario.from_json(scenario_path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read scenario {scenario_path}: {exc}") from exc
    dataset = generate_observables(scenario, mode=mode, seed=seed)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_dataset_csv(dataset, out / "dataset.csv")
    cumulative = np.cumsum(scenario.infections.values)
    _write_json(
        out / "ground_truth.json",
        {
            "scenario": scenario.to_dict(),
            "mode": mode,
            "seed": seed,
            "cumulative_infections": cumulative.tolist(),
            "total_deaths": float(dataset.deaths.values.sum()),
        },
    )
    print(f"wrote {out / 'dataset.csv'} ({len(dataset)} days, mode={mode}, "
          f"seed={seed}) and ground_truth.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifrlag",
        description="Estimate a time-varying infection fatality rate and "
                    "case-to-death lag from daily case/test/death counts.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("calibrate", "calibrate the case-ascertainment exponent m"),
        ("fit", "whole-period lag and IFR fit"),
        ("fit-intervals", "windowed lag and IFR fit with residual carryover"),
        ("estimate-infections", "emit the infection estimates at a fixed m"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="run configuration JSON")
        if name == "fit-intervals":
            p.add_argument("--width", type=int, default=None,
                           help="override interval width")
            p.add_argument("--max-lag", type=int, default=None,
                           help="override lag grid bound")
        if name == "estimate-infections":
            p.add_argument("--m", type=float, required=True,
                           help="ascertainment exponent (> 1)")

    p = sub.add_parser("simulate", help="generate a synthetic dataset")
    p.add_argument("--scenario", required=True, help="scenario JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("expected", "sampled"), default="expected")
    p.add_argument("--output-dir", default="out/simulated")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cmd_simulate(args.scenario, args.output_dir, args.seed, args.mode)
            return EXIT_OK
        config = RunConfig.from_json(args.config)
        if args.command == "fit-intervals":
            if args.width is not None:
                config = dataclasses.replace(config, interval_width=args.width)
            if args.max_lag is not None:
                config = dataclasses.replace(config, max_lag=args.max_lag)
            cmd_fit_intervals(config)
        elif args.command == "calibrate":
            cmd_calibrate(config)
        elif args.command == "fit":
            cmd_fit(config)
        elif args.command == "estimate-infections":
            cmd_estimate_infections(config, args.m)
        return EXIT_OK
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CalibrationError as exc:
        print(f"calibration error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except FitError as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT


if __name__ == "__main__":
    sys.exit(main())
