import datetime as dt
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from ifrlag.cli import main
from ifrlag.synth import default_scenario

K = 100
WIDTH = 50
IFRS = (0.006, 0.003)
M_TRUE = 2.4


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Scenario JSON, simulated dataset CSV and a matching run config."""
    root = tmp_path_factory.mktemp("cli")
    scenario = default_scenario(
        k=K, window=WIDTH, ifrs=IFRS, total_infections=2e6, m_true=M_TRUE,
        population=10_000_000,
    )
    scenario_path = root / "scenario.json"
    scenario_path.write_text(json.dumps(scenario.to_dict()))

    sim_dir = root / "sim"
    assert main(["simulate", "--scenario", str(scenario_path),
                 "--seed", "3", "--mode", "expected",
                 "--output-dir", str(sim_dir)]) == 0

    truth = json.loads((sim_dir / "ground_truth.json").read_text())
    anchor_day = 80
    anchor_count = truth["cumulative_infections"][anchor_day - 1]
    config = {
        "label": "synthetic",
        "dataset": {"path": "sim/dataset.csv"},
        "population": 10_000_000,
        "anchor": {
            "date": (dt.date(2020, 3, 1) + dt.timedelta(days=anchor_day - 1)
                     ).isoformat(),
            "count": anchor_count,
        },
        "date_range": {"start": "2020-03-01", "end": "2020-06-08"},
        "intervals": {"width": WIDTH, "min_trailing": 10},
        "max_lag": 20,
        "output_dir": "out",
    }
    config_path = root / "config.json"
    config_path.write_text(json.dumps(config))
    return root, scenario_path, config_path


def test_simulate_is_deterministic(workspace, tmp_path):
    root, scenario_path, _ = workspace
    for name in ("a", "b"):
        assert main(["simulate", "--scenario", str(scenario_path),
                     "--seed", "11", "--mode", "sampled",
                     "--output-dir", str(tmp_path / name)]) == 0
    assert (tmp_path / "a/dataset.csv").read_bytes() == \
        (tmp_path / "b/dataset.csv").read_bytes()
    assert (tmp_path / "a/ground_truth.json").read_bytes() == \
        (tmp_path / "b/ground_truth.json").read_bytes()


def test_calibrate_recovers_planted_m(workspace):
    root, _, config_path = workspace
    assert main(["calibrate", "--config", str(config_path)]) == 0
    payload = json.loads((root / "out/calibration.json").read_text())
    # CSV counts are rounded to whole numbers, so recovery is approximate
    assert payload["calibration"]["m"] == pytest.approx(M_TRUE, abs=0.05)
    assert payload["provenance"]["dataset_sha256"]
    assert payload["config"]["population"] == 10_000_000


def test_fit_intervals_outputs(workspace):
    root, _, config_path = workspace
    assert main(["fit-intervals", "--config", str(config_path)]) == 0
    out = root / "out"

    report = json.loads((out / "report.json").read_text())
    assert set(report["series"]) == {
        "cases", "tests", "infections", "deaths", "candidate_deaths"}
    assert all(len(v) == K for v in report["series"].values())
    assert [w["start_day"] for w in report["windows"]] == [1, 51]
    for window, ifr_true in zip(report["windows"], IFRS):
        assert window["ifr"] == pytest.approx(ifr_true, rel=0.05)
        assert {"start_day", "end_day", "lag_a", "lag_b", "ifr", "error",
                "warnings"} <= set(window)
    assert report["calibration"]["m"] == pytest.approx(M_TRUE, abs=0.05)

    lines = (out / "intervals.csv").read_text().splitlines()
    assert lines[0] == "start_day,end_day,lag_a,lag_b,ifr,error,warnings"
    assert len(lines) == 1 + len(report["windows"])

    for name in ("infections.svg", "tests.svg", "deaths_fit.svg"):
        svg = (out / name).read_text()
        root_el = ET.fromstring(svg)  # well-formed XML
        assert root_el.tag.endswith("svg")
    assert (out / "repairs.jsonl").exists()


def test_fit_intervals_deterministic_outputs(workspace, tmp_path):
    root, _, config_path = workspace
    cfg = json.loads(config_path.read_text())
    outputs = []
    for name in ("run1", "run2"):
        cfg["output_dir"] = str(tmp_path / name)
        rerun = tmp_path / f"{name}.json"
        rerun.write_text(json.dumps(cfg))
        # paths in the config resolve relative to the config file location
        cfg_local = json.loads(rerun.read_text())
        cfg_local["dataset"]["path"] = str(root / "sim/dataset.csv")
        rerun.write_text(json.dumps(cfg_local))
        assert main(["fit-intervals", "--config", str(rerun)]) == 0
        outputs.append(tmp_path / name)
    for fname in ("report.json", "intervals.csv", "infections.svg",
                  "tests.svg", "deaths_fit.svg"):
        assert (outputs[0] / fname).read_bytes() == \
            (outputs[1] / fname).read_bytes()


def test_whole_period_fit(workspace):
    root, _, config_path = workspace
    assert main(["fit", "--config", str(config_path)]) == 0
    payload = json.loads((root / "out/fit.json").read_text())
    fit = payload["fit"]
    assert fit["lag_a"] <= fit["lag_b"] <= 20
    assert 0 < fit["ifr"] < 0.05


def test_estimate_infections_csv(workspace):
    root, _, config_path = workspace
    assert main(["estimate-infections", "--config", str(config_path),
                 "--m", str(M_TRUE)]) == 0
    lines = (root / "out/infections.csv").read_text().splitlines()
    assert lines[0] == "day,date,cases,tests,infections"
    assert len(lines) == 1 + K
    first = lines[1].split(",")
    assert first[0] == "1" and first[1] == "2020-03-01"
    assert float(first[4]) >= float(first[2])  # infections dominate cases


def test_width_and_max_lag_overrides(workspace, tmp_path):
    root, _, config_path = workspace
    cfg = json.loads(config_path.read_text())
    cfg["dataset"]["path"] = str(root / "sim/dataset.csv")
    cfg["output_dir"] = str(tmp_path / "out")
    override = tmp_path / "cfg.json"
    override.write_text(json.dumps(cfg))
    assert main(["fit-intervals", "--config", str(override),
                 "--width", "25", "--max-lag", "8"]) == 0
    report = json.loads((tmp_path / "out/report.json").read_text())
    assert len(report["windows"]) == 4
    assert all(w["lag_b"] <= 8 for w in report["windows"])


def test_zero_death_series_still_succeeds(workspace, tmp_path):
    root, _, config_path = workspace
    rows = (root / "sim/dataset.csv").read_text().splitlines()
    header, data = rows[0], rows[1:]
    cols = header.split(",")
    d_idx = cols.index("deaths")
    zeroed = [header]
    for row in data:
        cells = row.split(",")
        cells[d_idx] = "0"
        zeroed.append(",".join(cells))
    (tmp_path / "zero.csv").write_text("\n".join(zeroed) + "\n")

    cfg = json.loads(config_path.read_text())
    cfg["dataset"]["path"] = str(tmp_path / "zero.csv")
    cfg["output_dir"] = str(tmp_path / "out")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["fit-intervals", "--config", str(cfg_path)]) == 0
    report = json.loads((tmp_path / "out/report.json").read_text())
    assert all(w["ifr"] == 0.0 for w in report["windows"])
    assert any(w["warnings"] for w in report["windows"])


def test_missing_config_exits_2(tmp_path, capsys):
    assert main(["calibrate", "--config", str(tmp_path / "nope.json")]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_scenario_exits_2(tmp_path, capsys):
    assert main(["simulate", "--scenario", str(tmp_path / "nope.json"),
                 "--output-dir", str(tmp_path / "out")]) == 2
    assert "error" in capsys.readouterr().err


def test_invalid_width_exits_2(workspace, capsys):
    _, _, config_path = workspace
    assert main(["fit-intervals", "--config", str(config_path),
                 "--width", "1"]) == 2
    assert "error" in capsys.readouterr().err


def test_infeasible_anchor_exits_3(workspace, tmp_path):
    root, _, config_path = workspace
    cfg = json.loads(config_path.read_text())
    cfg["dataset"]["path"] = str(root / "sim/dataset.csv")
    cfg["anchor"] = {"date": cfg["anchor"]["date"], "count": 1.0}
    cfg["output_dir"] = str(tmp_path / "out")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cfg))
    assert main(["calibrate", "--config", str(bad)]) == 3


def test_anchor_outside_range_exits_2(workspace, tmp_path):
    root, _, config_path = workspace
    cfg = json.loads(config_path.read_text())
    cfg["dataset"]["path"] = str(root / "sim/dataset.csv")
    cfg["anchor"] = {"date": "2021-01-01", "count": 1000.0}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cfg))
    assert main(["calibrate", "--config", str(bad)]) == 2


def test_module_entry_point(workspace):
    _, scenario_path, _ = workspace
    proc = subprocess.run(
        [sys.executable, "-m", "ifrlag", "--version"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip()
