import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from storebaseline.cli import main
from storebaseline.models import load_model

DATA = Path(__file__).parent / "data"


def run(*argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


@pytest.fixture(scope="module")
def store_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("store") / "macedo.csv"
    assert run("synth", "--profile", "macedo", "--days", 300, "--start-date", "2016-01-01", "--seed", 3, "--output", path) == 0
    return path


def test_ingest_matches_golden(tmp_path, capsys):
    out = tmp_path / "daily.csv"
    assert run("ingest", "--input", DATA / "raw_fixture.csv", "--output", out) == 0
    assert out.read_bytes() == (DATA / "daily_golden.csv").read_bytes()
    assert "1 duplicate timestamp" in capsys.readouterr().err


def test_ingest_empty_input(tmp_path, capsys):
    src = tmp_path / "empty.csv"
    src.write_text("timestamp,energy_kwh,temp_c\n")
    assert run("ingest", "--input", src, "--output", tmp_path / "o.csv") == 2
    assert "no readings" in capsys.readouterr().err
    src.write_text("")
    assert run("ingest", "--input", src, "--output", tmp_path / "o.csv") != 0


def test_ingest_bad_line(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text("timestamp,energy_kwh,temp_c\n2016-01-01T00:00,-1,3\n")
    assert run("ingest", "--input", src, "--output", tmp_path / "o.csv") == 2
    assert "negative consumption at line 2" in capsys.readouterr().err


def test_usage_errors_exit_one(tmp_path):
    assert run() == 1
    assert run("learning-curve", "--train-sizes", "ten") == 1
    assert run("learning-curve") == 1
    assert run("synth", "--output", tmp_path / "s.csv", "--reduction", 1.5) == 1
    assert run("longterm", "--data", "x.csv", "--train-days", 200) == 1


def test_missing_file_is_data_error(tmp_path):
    assert run("learning-curve", "--data", tmp_path / "nope.csv") == 2


def test_synth_outputs_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run("synth", "--days", 3, "--seed", 9, "--output", p) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "timestamp,energy_kwh,temp_c" and len(lines) == 1 + 3 * 96
    truth = (tmp_path / "a_truth.csv").read_text().splitlines()
    assert truth[0] == "date,true_kwh,post_retrofit" and len(truth) == 4


def test_synth_reduction_zero_equals_plain(tmp_path):
    run("synth", "--days", 5, "--output", tmp_path / "a.csv")
    run("synth", "--days", 5, "--output", tmp_path / "b.csv", "--retrofit-date", "2015-12-06", "--reduction", 0)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_learning_curve_outputs(store_csv, tmp_path):
    out = tmp_path / "lc"
    code = run("learning-curve", "--data", store_csv, "--models", "mlr,rf", "--n-trees", 5,
               "--train-sizes", "30:60:30", "--step", 30, "--out", out, "--seed", 1)
    assert code == 0
    rows = list(csv.DictReader((out / "learning_curve.csv").open()))
    assert [(r["model"], r["train_size_days"], r["n_iterations"]) for r in rows] == [
        ("mlr", "30", "6"), ("mlr", "60", "6"), ("rf", "30", "6"), ("rf", "60", "6")
    ]
    summary = json.loads((out / "learning_curve_summary.json").read_text())
    best = min(rows, key=lambda r: float(r["mae_mean_std_units"]))
    assert summary["best"]["model"] == best["model"]
    assert summary["best"]["train_size_days"] == int(best["train_size_days"])
    assert summary["seed"] == 1 and summary["stores"] == ["macedo"]


def test_learning_curve_single_point(store_csv, tmp_path):
    assert run("learning-curve", "--data", store_csv, "--models", "mlr", "--train-sizes", "30",
               "--anchors", 1, "--out", tmp_path) == 0
    assert len((tmp_path / "learning_curve.csv").read_text().splitlines()) == 2


def test_learning_curve_infeasible(store_csv, tmp_path, capsys):
    assert run("learning-curve", "--data", store_csv, "--models", "mlr", "--train-sizes", "400",
               "--out", tmp_path) == 2
    assert "infeasible" in capsys.readouterr().err


def test_config_file_and_env_seed(store_csv, tmp_path, monkeypatch):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({
        "models": "rf", "train_sizes": [30], "anchors": 2,
        "model_params": {"rf": {"n_trees": 3}},
    }))
    monkeypatch.setenv("BASELINE_SEED", "17")
    assert run("--config", config, "learning-curve", "--data", store_csv, "--out", tmp_path / "a") == 0
    summary = json.loads((tmp_path / "a" / "learning_curve_summary.json").read_text())
    assert summary["seed"] == 17 and summary["models"] == ["rf"] and summary["n_anchors"] == 2
    # a flag beats both the environment and the config
    assert run("--config", config, "learning-curve", "--data", store_csv, "--out", tmp_path / "b",
               "--seed", 17, "--anchors", 3) == 0
    summary = json.loads((tmp_path / "b" / "learning_curve_summary.json").read_text())
    assert summary["n_anchors"] == 3
    rows_a = (tmp_path / "a" / "learning_curve.csv").read_text().splitlines()
    rows_b = (tmp_path / "b" / "learning_curve.csv").read_text().splitlines()
    assert rows_a[0] == rows_b[0] and rows_a[1] != rows_b[1]


def test_bad_env_seed(store_csv, tmp_path, monkeypatch):
    monkeypatch.setenv("BASELINE_SEED", "abc")
    assert run("learning-curve", "--data", store_csv, "--models", "mlr", "--out", tmp_path) == 1


def test_error_timeline_and_longterm(store_csv, tmp_path):
    assert run("error-timeline", "--data", store_csv, "--train-start", "2016-03-01", "--train-days", 30,
               "--out", tmp_path) == 0
    rows = list(csv.DictReader((tmp_path / "error_timeline.csv").open()))
    assert rows[0]["block_start_date"] == "2016-03-31" and rows[0]["block_index"] == "0"
    assert all(1 <= int(r["n_predictions"]) <= 10 for r in rows)

    assert run("longterm", "--data", store_csv, "--train-days", 180, "--models", "mlr", "--out", tmp_path) == 0
    rows = list(csv.DictReader((tmp_path / "longterm_180.csv").open()))
    # 299 feature rows, 180 of them training
    assert sum(int(r["n_predictions"]) for r in rows) == 119


def test_savings_command(tmp_path):
    raw = tmp_path / "retro.csv"
    assert run("synth", "--days", 200, "--start-date", "2016-01-01", "--retrofit-date", "2016-05-01",
               "--reduction", 0.2, "--output", raw) == 0
    daily = tmp_path / "retro_daily.csv"
    assert run("ingest", "--input", raw, "--output", daily) == 0
    model = tmp_path / "baseline.json"
    assert run("savings", "--data", daily, "--retrofit-date", "2016-05-01", "--out", tmp_path,
               "--save-model", model) == 0
    report = json.loads((tmp_path / "savings_report.json").read_text())
    assert report["train_end"] == "2016-04-10" and report["model"] == "mlr"
    assert 10 < report["savings_pct"] < 30
    lines = (tmp_path / "savings_daily.csv").read_text().splitlines()
    assert lines[0] == "date,predicted_kwh,observed_kwh,post_retrofit" and len(lines) == 51
    assert load_model(model.open()).train_end.isoformat() == "2016-04-10"
    assert run("savings", "--data", daily, "--retrofit-date", "2016-01-20", "--out", tmp_path) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "storebaseline", "synth", "--days", "2", "--output", str(tmp_path / "s.csv")],
        capture_output=True,
    )
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "storebaseline", "bogus"], capture_output=True)
    assert proc.returncode == 1
