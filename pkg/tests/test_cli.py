"""Command-line interface."""

import json

import pytest

from dottrace.cli import main

FAST_ARGS = ["--speed", "3.0", "--dwell", "0.1", "--jitter", "0.0005",
             "--sample-rate", "50", "--speed-rel-sd", "0.2",
             "--dwell-rel-sd", "0.2"]


def test_power_required_n(capsys):
    assert main(["power", "--effect-size-f", "0.403"]) == 0
    out = capsys.readouterr().out
    assert "required sample size: n = 10" in out


def test_power_from_eta2_at_fixed_n(capsys):
    assert main(["power", "--eta2", "0.14", "--n", "10"]) == 0
    out = capsys.readouterr().out
    assert "effect size f = 0.403473" in out
    assert "power at n = 10" in out


def test_power_table_written(tmp_path, capsys):
    table = tmp_path / "power.csv"
    assert main(["power", "--effect-size-f", "0.403",
                 "--table", str(table)]) == 0
    lines = table.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "n,power"
    rows = dict(line.split(",") for line in lines[1:])
    assert rows["10"].startswith("0.81")


def test_power_domain_error_exits_1(capsys):
    assert main(["power", "--eta2", "1.5"]) == 1
    assert "error:" in capsys.readouterr().err


def test_design_plan(tmp_path, capsys):
    out_csv = tmp_path / "plan.csv"
    assert main(["design", "--conditions", "4", "--participants", "12",
                 "--out", str(out_csv)]) == 0
    stdout = capsys.readouterr().out
    assert "balanced latin square, order 4:" in stdout
    lines = out_csv.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "participant,position1,position2,position3,position4"
    assert len(lines) == 13
    # twelve participants cycle over the four row patterns three times each
    orders = [line.split(",", 1)[1] for line in lines[1:]]
    assert all(orders.count(o) == 3 for o in set(orders))


def test_design_odd_order_exits_1(capsys):
    assert main(["design", "--conditions", "3"]) == 1
    assert "error:" in capsys.readouterr().err


def test_simulate_analyze_metrics_round_trip(tmp_path, capsys):
    data = tmp_path / "cohort"
    report = tmp_path / "report"
    assert main(["simulate", "--participants", "2", "--seed", "9",
                 "--out", str(data), "--ooo-prob", "0", *FAST_ARGS]) == 0
    assert "simulated 2 participants, 8 sessions" in capsys.readouterr().out

    assert main(["analyze", "--manifest", str(data / "manifest.json"),
                 "--out", str(report)]) == 0
    stdout = capsys.readouterr().out
    assert "analyzed 8 sessions" in stdout
    assert (report / "metrics.csv").exists()
    assert (report / "anova.csv").exists()

    assert main(["metrics",
                 "--log", str(data / "logs" / "P01_vertical-flat.jsonl"),
                 "--trace", str(data / "traces" / "P01_vertical-flat.csv")]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["participant_id"] == "P01"
    assert record["dot_count"] == 69
    assert record["mistakes"] == 0


def test_metrics_missing_file_exits_1(tmp_path, capsys):
    assert main(["metrics", "--log", str(tmp_path / "no.jsonl"),
                 "--trace", str(tmp_path / "no.csv")]) == 1
    assert "error:" in capsys.readouterr().err


def test_serve_rejects_bad_listen(capsys):
    assert main(["serve", "--listen", "nonsense"]) == 1
    assert "HOST:PORT" in capsys.readouterr().err


def test_simulate_bad_scale_label_exits_1(tmp_path, capsys):
    assert main(["simulate", "--participants", "2", "--out", str(tmp_path),
                 "--dwell-scale", "sideways-flat=1.2", *FAST_ARGS]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_subcommand_rejected():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
