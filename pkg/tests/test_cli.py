import json

import pandas as pd
import pytest

from driftburst import __version__
from driftburst.cli.main import main
from driftburst.errors import FitError


@pytest.fixture
def day_csv(tmp_path):
    path = tmp_path / "day.csv"
    assert main(["simulate", "--scenario", "flash_crash", "--seed", "3", "--n", "2340",
                 "--output", str(path)]) == 0
    return path


def test_no_command_prints_help(capsys):
    assert main([]) == 0
    assert "driftburst" in capsys.readouterr().out


def test_version(capsys):
    assert main(["version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_simulate_writes_ticks(day_csv, capsys):
    frame = pd.read_csv(day_csv)
    assert list(frame.columns) == ["ts_ms", "bid", "ask", "trade_px", "trade_sz"]
    assert len(frame) == 2_341


def test_simulate_unknown_scenario(capsys):
    assert main(["simulate", "--scenario", "no_such_day"]) == 1
    assert "✗" in capsys.readouterr().err


def test_detect_writes_report(day_csv, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["detect", "--data", str(day_csv), "--output-dir", str(out),
                 "--grid-spacing", "60", "--threshold", "4.0"])
    assert code == 0
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["config"]["threshold"] == 4.0
    assert report["config"]["detector"]["grid_spacing"] == 60.0
    assert "1970-01-01" in capsys.readouterr().out


def test_detect_missing_data(tmp_path, capsys):
    assert main(["detect", "--data", str(tmp_path / "absent.csv")]) == 1
    assert "✗" in capsys.readouterr().err


def test_detect_bad_config_key(day_csv, tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("treshold: 4\n", encoding="utf-8")
    assert main(["detect", "--data", str(day_csv), "--config", str(config)]) == 1


def test_crit_build_and_query(tmp_path, capsys):
    table = tmp_path / "table.json"
    assert main(["crit", "build", "--output", str(table), "--m", "50", "200", "--rho", "0", "0.5",
                 "--levels", "0.95", "--n-sims", "1000"]) == 0
    assert table.exists()
    assert main(["crit", "query", "--table", str(table), "--m", "100", "--rho", "0.2",
                 "--level", "0.95"]) == 0
    assert "m=100" in capsys.readouterr().out
    assert main(["crit", "query", "--table", str(table), "--m", "5000", "--rho", "0.2",
                 "--level", "0.95"]) == 1


def test_fit_db_requires_peaks(day_csv, capsys):
    assert main(["fit-db", "--data", str(day_csv)]) == 1
    assert "--peak-time" in capsys.readouterr().err


def test_fit_db_numerical_failure(day_csv, mocker, capsys):
    mocker.patch("driftburst.cli.main.fit_event_window", side_effect=FitError("収束しません"))
    assert main(["fit-db", "--data", str(day_csv), "--peak-time", "11700"]) == 2
    assert "数値計算" in capsys.readouterr().err


def test_fit_db_writes_output(day_csv, tmp_path):
    output = tmp_path / "fits.json"
    assert main(["fit-db", "--data", str(day_csv), "--peak-time", "11700", "--window", "1800",
                 "--sampling", "10", "--output", str(output)]) == 0
    fits = json.loads(output.read_text(encoding="utf-8"))["fits"]
    assert fits[0]["peak_time"] == 11_700.0
    assert fits[0]["n"] == 179


def test_experiment_command(mocker, tmp_path, capsys):
    frame = pd.DataFrame({"alpha": [None], "beta": [None], "drift_bandwidth": [300.0], "level": [0.95],
                          "rejection_rate": [0.04], "replications": [100], "m": [390],
                          "mean_T_star": [3.1], "mean_rho_hat": [0.9]})
    run = mocker.patch("driftburst.cli.main.run_experiment", return_value=frame)
    output = tmp_path / "size_power.csv"
    assert main(["experiment", "--scenario", "null_day", "--alphas", "none", "--betas", "none",
                 "--bandwidths", "300", "--replications", "100", "--output", str(output)]) == 0
    cells = run.call_args.args[1]
    assert len(cells) == 1 and cells[0].design == (None, None)
    assert output.exists()
    assert "4.0" in capsys.readouterr().out


def test_events_command(day_csv, tmp_path, capsys):
    out = tmp_path / "events"
    assert main(["events", "--data", str(day_csv), "--output-dir", str(out), "--grid-spacing", "60"]) == 0
    assert (out / "event_analysis.json").exists()
    assert (out / "event_returns.csv").exists()
    assert "⚠️ 反転回帰" in capsys.readouterr().out
