import json
import subprocess
import sys

import pytest

from hypersymplectic.cli import main

BAD_SECTION = {
    "scenario": "custom-section",
    "suites": ["sections"],
    "sections": [{"name": "skew", "form": "sigma", "p": [[[[1, 0], 1.0]]], "q": [[]]}],
}


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "hypersymplectic", *args],
        capture_output=True,
        text=True,
        timeout=300,
    )


def test_list_flag(capsys):
    assert main(["--list"]) == 0
    out = capsys.readouterr().out
    assert "paper-n1" in out and "suites:" in out


def test_missing_config_exits_2_without_writing(tmp_path):
    report = tmp_path / "report.json"
    proc = run_cli("--config", str(tmp_path / "absent.json"), "--output", str(report))
    assert proc.returncode == 2
    assert not report.exists()
    assert "configuration error" in proc.stderr


def test_invalid_json_exits_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert main(["--config", str(cfg)]) == 2


def test_unknown_scenario_exits_2():
    proc = run_cli("--scenario", "warp")
    assert proc.returncode == 2
    assert "unknown scenario" in proc.stderr


def test_report_written_on_success(tmp_path):
    report = tmp_path / "out.json"
    proc = run_cli(
        "--scenario", "paper-n1", "--output", str(report), "--seed", "7"
    )
    assert proc.returncode == 0
    assert "verdict: pass" in proc.stdout
    document = json.loads(report.read_text())
    assert document["schema_version"] == "1"
    body = document["report"]
    assert body["verdict"] == "pass"
    assert body["config"]["sampling"]["seed"] == 7
    assert body["scenario"] == "paper-n1"
    assert document["timing"]["duration_seconds"] > 0
    names = [c["identity"] for c in body["checks"]]
    assert names == sorted(names)


def test_stdout_json_when_no_output_path():
    proc = run_cli("--scenario", "paper-n1", "--tolerance-fd", "1e-5")
    assert proc.returncode == 0
    document = json.loads(proc.stdout)
    assert document["report"]["config"]["tolerances"]["fd"] == 1e-5
    assert "verdict: pass" in proc.stderr


def test_failing_checks_exit_1_but_still_report(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(BAD_SECTION))
    report = tmp_path / "report.json"
    proc = run_cli("--config", str(cfg), "--output", str(report))
    assert proc.returncode == 1
    assert report.exists()
    assert json.loads(report.read_text())["report"]["verdict"] == "fail"


def test_cli_flags_override_the_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "paper-n", "suites": ["lagrangian-fibres"]}))
    proc = run_cli("--config", str(cfg), "--scenario", "paper-n1")
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["scenario"] == "paper-n1"


def test_config_output_field_is_honoured(tmp_path):
    report = tmp_path / "from_config.json"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"suites": ["lagrangian-fibres"], "output": str(report)})
    )
    assert main(["--config", str(cfg)]) == 0
    assert report.exists()
