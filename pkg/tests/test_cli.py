import json

import pytest

from officesim.cli import main

from conftest import make_building_text

SMALL_SCENARIO = """
building: building.yaml
seed: 5
horizon_days: 1
replications: 2
population:
  size: 4
"""


@pytest.fixture
def scenario_path(tmp_path):
    (tmp_path / "building.yaml").write_text(make_building_text())
    path = tmp_path / "scenario.yaml"
    path.write_text(SMALL_SCENARIO)
    return path


def test_validate_ok(scenario_path, capsys):
    assert main(["validate", "--scenario", str(scenario_path)]) == 0
    assert "OK" in capsys.readouterr().out


def test_validate_rejects_bad_scenario(tmp_path, capsys):
    path = tmp_path / "scenario.yaml"
    path.write_text("horizon_days: 1\n")
    assert main(["validate", "--scenario", str(path)]) == 1
    assert "building" in capsys.readouterr().err


def test_missing_scenario_file_is_config_error(tmp_path):
    assert main(["validate", "--scenario", str(tmp_path / "nope.yaml")]) == 1


def test_unknown_flag_rejected(scenario_path):
    assert main(["validate", "--scenario", str(scenario_path), "--frobnicate"]) == 1


def test_unknown_command_rejected():
    assert main(["launch"]) == 1


def test_summary_prints_inventory(scenario_path, capsys):
    assert main(["summary", "--scenario", str(scenario_path)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["rooms"] == 5
    assert summary["computers"] == 5


def test_simulate_writes_outputs(scenario_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", "--scenario", str(scenario_path),
                 "--out", str(out)]) == 0
    assert (out / "minutes_mean.csv").exists()
    assert (out / "manifest.json").exists()
    assert len((out / "minutes_mean.csv").read_text().splitlines()) == 1441
    assert "mean total" in capsys.readouterr().out


def test_simulate_reruns_byte_identically(scenario_path, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--scenario", str(scenario_path), "--out", str(out_a)]) == 0
    assert main(["simulate", "--scenario", str(scenario_path), "--out", str(out_b)]) == 0
    for path in sorted(out_a.rglob("*")):
        if path.is_file():
            assert (out_b / path.relative_to(out_a)).read_bytes() == path.read_bytes()


def test_simulate_overrides_days_and_reps(scenario_path, tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", "--scenario", str(scenario_path), "--days", "2",
                 "--reps", "1", "--seed", "77", "--out", str(out)]) == 0
    assert len((out / "minutes_mean.csv").read_text().splitlines()) == 1 + 2880
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["replications"] == 1
    assert manifest["master_seed"] == 77


def test_compare_reports_lower_policy(scenario_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["compare", "--scenario", str(scenario_path),
                 "--contact-rate", "2.0", "--out", str(out)]) == 0
    report = json.loads((out / "comparison.json").read_text())
    assert report["lower_consumption_policy"] in ("automated", "staff_controlled")
    assert "lower consumption" in capsys.readouterr().out


def test_proportions_window_flag(scenario_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["proportions", "--scenario", str(scenario_path),
                 "--window", "night", "--out", str(out)]) == 0
    report = json.loads((out / "proportions.json").read_text())
    assert report["window"] == "night"


def test_bad_window_value_rejected(scenario_path, tmp_path):
    assert main(["proportions", "--scenario", str(scenario_path),
                 "--window", "lunch", "--out", str(tmp_path / "o")]) == 1


def test_runtime_error_exit_code(scenario_path, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    code = main(["simulate", "--scenario", str(scenario_path),
                 "--out", str(blocker / "sub")])
    assert code == 2
