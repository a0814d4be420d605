# tests/test_cli.py
from __future__ import annotations

import json

import pytest

from dilution_planner.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_OK, EXIT_USAGE, main
from dilution_planner.config import DATA_DIR, WITNESS_JSON_NAME

TS1 = "5/16,11/16,14/16,16/16,14/16,11/16,5/16"
WITNESS = str(DATA_DIR / WITNESS_JSON_NAME)


def test_plan_twowaymix_summary(tmp_path, capsys):
    out = tmp_path / "plan.json"
    assert main(["plan", "--algorithm", "twowaymix", "--targets", "5/16", "--output", str(out)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "S=2 B=3 W=4 steps=4 peak=1"
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["algorithm"] == "twowaymix" and len(doc["steps"]) == 4


def test_plan_emdp_ts1_json_on_stdout(capsys):
    assert main(["plan", "--targets", TS1]) == EXIT_OK
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert doc["stats"]["samples"] <= 5 and doc["stats"]["steps"] <= 9
    assert captured.err.startswith("S=5 ")


def test_plan_text_and_series_order(capsys):
    assert main(["plan", "--targets", TS1, "--order", "series", "--format", "text"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("targets: 5/16, 11/16, 14/16, 16/16")
    assert "S=" in out.splitlines()[-1]


def test_plan_targets_from_file(tmp_path, capsys):
    path = tmp_path / "targets.txt"
    path.write_text("# ts\n1/2\n0.5\n", encoding="utf-8")
    assert main(["plan", "--targets", str(path), "--format", "csv"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "step,input_a,input_b,out,disposition_a,disposition_b"
    assert out.strip().endswith("S=1 B=1 W=0 steps=1 peak=0")


def test_empty_targets_is_usage_error(capsys):
    assert main(["plan", "--algorithm", "emdp", "--targets", ""]) == EXIT_USAGE
    assert "no targets" in capsys.readouterr().err


def test_bad_cf_is_usage_error():
    assert main(["plan", "--targets", "5/16,3/10"]) == EXIT_USAGE


def test_unknown_flag_exits_one():
    with pytest.raises(SystemExit) as e:
        main(["plan", "--targets", "1/2", "--frobnicate"])
    assert e.value.code == EXIT_USAGE


def test_validate_witness(capsys):
    assert main(["validate", "--plan", WITNESS]) == EXIT_OK
    out = capsys.readouterr().out
    assert "S=5 B=4 W=2 steps=8" in out and "valid" in out


def test_validate_witness_json_trace(capsys):
    assert main(["validate", "--plan", WITNESS, "--format", "json"]) == EXIT_OK
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert doc["valid"] is True
    assert doc["stats"] == {"samples": 5, "buffers": 4, "waste": 2, "steps": 8, "peak_storage": 5}
    assert len(doc["records"]) == 8
    assert doc["violations"] == []
    assert doc["conservation"]["droplets_in"] == doc["conservation"]["droplets_out"] == 9
    assert "valid" in captured.err


def test_validate_trace_to_file(tmp_path, capsys):
    out = tmp_path / "trace.json"
    doc = json.loads(open(WITNESS, encoding="utf-8").read())
    doc["steps"][2]["inputs"] = ["sample", "1.0"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["validate", "--plan", str(bad), "--output", str(out)]) == EXIT_INVALID
    trace = json.loads(out.read_text(encoding="utf-8"))
    assert trace["valid"] is False
    assert trace["violations"][0]["kind"] == "double-consumption"
    assert "invalid" in capsys.readouterr().out


def test_validate_bad_plan(tmp_path, capsys):
    doc = json.loads(open(WITNESS, encoding="utf-8").read())
    doc["steps"][2]["inputs"] = ["sample", "1.0"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["validate", "--plan", str(path)]) == EXIT_INVALID
    assert "double-consumption" in capsys.readouterr().out


def test_validate_malformed_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format_version": 9}', encoding="utf-8")
    assert main(["validate", "--plan", str(path)]) == EXIT_INVALID


def test_export_dot(tmp_path):
    out = tmp_path / "w.dot"
    assert main(["export-dot", "--plan", WITNESS, "--output", str(out)]) == EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert text.count("[label=\"M") == 8
    assert main(["export-dot", "--plan", WITNESS, "--output", str(tmp_path / "again.dot")]) == EXIT_OK
    assert (tmp_path / "again.dot").read_text(encoding="utf-8") == text


def test_gen_series(capsys):
    argv = ["gen-series", "--family", "harmonic", "--a", "1/2", "--n", "3", "--precision", "4"]
    assert main(argv) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == ["8/16", "4/16", "3/16"]
    assert main(argv + ["--format", "text"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "8/16,4/16,3/16"


def test_gen_series_range_error(capsys):
    argv = ["gen-series", "--family", "linear", "--a", "1/2", "--delta", "1/4", "--n", "4", "--precision", "3"]
    assert main(argv) == EXIT_USAGE
    assert "value 4" in capsys.readouterr().err


def test_compare_csv(capsys):
    assert main(["compare", "--series", "ts1,ts2,ts3", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert "W (published)" in lines[0]
    assert len(lines) == 1 + 3 * (2 + 6)
    assert lines[1].startswith("ts1,emdp,7,ok,5,")


def test_compare_family_is_deterministic(capsys):
    argv = ["compare", "--family", "geometric", "--n", "8", "--precision", "5", "--seed", "7", "--format", "csv"]
    assert main(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out == first
    assert "published" not in first


def test_compare_unknown_series():
    assert main(["compare", "--series", "ts9"]) == EXIT_USAGE


def test_oracle_small(capsys):
    assert main(["oracle", "--targets", "3/4", "--format", "text"]) == EXIT_OK
    assert "steps=2" in capsys.readouterr().out


def test_oracle_budget_exhausted(capsys):
    argv = ["oracle", "--targets", TS1, "--budget", "1e-6", "--no-prune"]
    assert main(argv) == EXIT_BUDGET
    assert "unknown" in capsys.readouterr().err


def test_oracle_infeasible():
    assert main(["oracle", "--targets", "1/64"]) == EXIT_INVALID
