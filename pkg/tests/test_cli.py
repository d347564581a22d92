import json

import pytest

from hardymod.cli import main
from hardymod.scenario_io import canonical_json, serialize_scenario
from hardymod.corpus import example


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_builtin_ex67(capsys):
    code, out, _ = run_cli(capsys, "verify", "--builtin", "ex6.7")
    assert code == 0
    report = json.loads(out)
    assert report["verdicts"] == ["fail", "pass", "fail"]
    assert report["expected_match"] is True
    assert report["biconditional_holds"] is True


def test_verify_report_deterministic(capsys):
    _, out1, _ = run_cli(capsys, "verify", "--builtin", "ex6.2")
    _, out2, _ = run_cli(capsys, "verify", "--builtin", "ex6.2")
    assert out1 == out2


def test_corpus_all_match(capsys):
    code, out, _ = run_cli(capsys, "corpus")
    assert code == 0
    report = json.loads(out)
    assert report["all_match"] is True
    assert {row["name"] for row in report["entries"]} == {"ex6.2", "ex6.7", "ex7.4", "eq3.17"}


def test_corpus_mismatch_exits_one(capsys, monkeypatch):
    import hardymod.cli as cli_mod
    from hardymod.corpus import ExpectedVerdicts
    import dataclasses

    real_example = cli_mod.example

    def sabotaged(name, **kw):
        scenario = real_example(name, **kw)
        if name == "ex6.2":
            scenario = dataclasses.replace(
                scenario, expected=ExpectedVerdicts("fail", "pass", "pass"))
        return scenario

    monkeypatch.setattr(cli_mod, "example", sabotaged)
    code, out, _ = run_cli(capsys, "corpus")
    assert code == 1


def test_decompose_dims(capsys):
    code, out, _ = run_cli(capsys, "decompose", "--builtin", "ex6.2")
    assert code == 0
    report = json.loads(out)
    assert report["decomposition"]["dims"] == [0, 2, 3, 4, 5]
    assert report["closure_exact"] is True


def test_check_single_property(capsys):
    code, out, _ = run_cli(capsys, "check", "--builtin", "ex6.7",
                           "--property", "full-projection")
    assert code == 0
    report = json.loads(out)
    assert report["property"]["verdict"] == "fail"
    assert report["property"]["witness_count"] >= 1


def test_synthesize_success(capsys):
    code, out, _ = run_cli(capsys, "synthesize", "--builtin", "ex6.2",
                           "--r", "z1", "--h", "1,0")
    assert code == 0
    report = json.loads(out)
    assert report["obstruction"] is None
    assert report["synthesis"]["final_residual"] <= 1e-10


def test_synthesize_obstruction(capsys):
    code, out, _ = run_cli(capsys, "synthesize", "--builtin", "ex6.7",
                           "--r", "z1", "--h", "1,1")
    assert code == 0
    report = json.loads(out)
    assert report["obstruction"] is not None
    assert report["obstruction"]["level"] == 2


def test_synthesize_bad_component(capsys):
    code, _, err = run_cli(capsys, "synthesize", "--builtin", "ex6.2",
                           "--r", "z1", "--h", "9,9")
    assert code == 2
    assert "component,index" in err


def test_axioms_command(capsys):
    code, out, _ = run_cli(capsys, "axioms", "--n", "2", "--degree", "5",
                           "--samples", "60", "--seed", "0")
    assert code == 0
    report = json.loads(out)
    assert report["axioms"]["passed"] is True


def test_fuzz_fixed_cell(capsys):
    code, out, _ = run_cli(capsys, "fuzz", "--seeds", "1:10", "--n", "2", "--degree", "6")
    assert code == 0
    report = json.loads(out)
    assert report["summary"]["cases"] == 10
    assert report["summary"]["biconditional_failures"] == 0
    assert report["counterexamples"] == []


def test_fuzz_mixed_schedule_with_jobs(capsys):
    code, out, _ = run_cli(capsys, "fuzz", "--seeds", "1:6", "--jobs", "2")
    assert code == 0
    report = json.loads(out)
    assert report["summary"]["cases"] == 6
    assert report["summary"]["biconditional_failures"] == 0


def test_scenario_file_input(tmp_path, capsys):
    doc = serialize_scenario(example("ex6.2"))
    path = tmp_path / "scenario.json"
    path.write_text(canonical_json(doc))
    code, out, _ = run_cli(capsys, "verify", "--scenario", str(path))
    assert code == 0
    assert json.loads(out)["verdicts"] == ["pass", "pass", "pass"]


def test_schema_error_exit_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"version": 1, "space": {"n": 2, "d": 1}}')
    code, _, err = run_cli(capsys, "verify", "--scenario", str(path))
    assert code == 2
    assert "space" in err


def test_missing_scenario_exit_two(capsys):
    code, _, err = run_cli(capsys, "verify")
    assert code == 2
    assert "no scenario" in err


def test_output_file_and_timing(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "verify", "--builtin", "ex6.2",
                           "-o", str(out_path), "--timing")
    assert code == 0
    assert out == ""
    report = json.loads(out_path.read_text())
    assert "timing_seconds" in report


def test_env_tolerance_override(capsys, monkeypatch):
    monkeypatch.setenv("HARDYMOD_TOL_MEMBER", "1e-7")
    code, out, _ = run_cli(capsys, "verify", "--builtin", "ex6.2")
    assert code == 0
    assert json.loads(out)["tolerances"]["member"] == 1e-7


def test_bad_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("HARDYMOD_TOL_MEMBER", "soft")
    code, _, err = run_cli(capsys, "verify", "--builtin", "ex6.2")
    assert code == 2
    assert "HARDYMOD_TOL_MEMBER" in err
