import io
import json
from pathlib import Path

import pytest

import app
from modules.brauer import formula
from utils.errors import ConsistencyError
from utils.helpers import check_record, suite_result

PROBLEMS = Path(__file__).resolve().parents[1] / "data" / "problems"
GOLDEN = PROBLEMS.parent / "golden"


def run_cli(capsys, *argv: str):
    code = app.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv: str):
    code, out = run_cli(capsys, *argv)
    return code, json.loads(out)


def test_exponent_command(capsys) -> None:
    code, report = run_json(capsys, "exponent", "--n", "4", "--p", "2")
    assert code == 0
    assert report["results"]["outer_exponent"] == 2
    assert report["command"] == {"name": "exponent", "n": 4, "p": 2, "max_elems": None, "max_nodes": None}
    assert "timing" not in report


def test_budget_exceeded_exit_code(capsys) -> None:
    code, report = run_json(capsys, "exponent", "--n", "5", "--p", "3", "--max-elems", "10")
    assert code == 3
    assert report["error"]["budget"] == "max_elems"


def test_run_brauer_example(capsys) -> None:
    code, report = run_json(capsys, "run", str(PROBLEMS / "e_n4.json"))
    assert code == 0
    results = report["results"]
    assert results["kind"] == "brauer"
    assert results["order"] == 4
    assert results["sha"] == results["formula"] == 1
    assert results["sha_b0"] == 0


def test_suite_honours_budget_flags(capsys) -> None:
    code, report = run_json(capsys, "suite", "prs", "--max-elems", "1")
    assert code == 3
    assert report["error"]["budget"] == "max_elems"
    assert report["error"]["limit"] == 1


@pytest.mark.parametrize("name,defined,zero", [
    ("trivial_massey.json", True, True),
    ("klein_cup.json", True, False),
    ("z2_twisted.json", True, None),
])
def test_run_massey_examples(capsys, name: str, defined: bool, zero) -> None:
    code, report = run_json(capsys, "run", str(PROBLEMS / name))
    assert code == 0
    results = report["results"]
    assert results["defined"] is defined
    if zero is not None:
        assert results["vanishes"] is zero
    assert results["product_set"]["contains_zero"] is results["vanishes"]


@pytest.mark.parametrize("name", ["trivial_massey", "klein_cup", "z2_twisted"])
def test_run_matches_golden_report(capsys, monkeypatch, name: str) -> None:
    text = (PROBLEMS / f"{name}.json").read_text(encoding="utf-8")
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out = run_cli(capsys, "run", "-")
    assert code == 0
    assert out == (GOLDEN / f"{name}.json").read_text(encoding="utf-8")


def test_run_embedding_and_group(capsys) -> None:
    code, report = run_json(capsys, "run", str(PROBLEMS / "z2_into_u3.json"))
    assert code == 0
    assert report["results"]["status"] == "unsolvable"
    assert report["results"]["images"] is None
    code, report = run_json(capsys, "run", str(PROBLEMS / "u1_n3_p2.json"))
    assert code == 0
    assert report["results"]["order"] == 8
    assert report["results"]["abelian"] is True
    assert report["results"]["bogomolov"]["trivial"] is True


def test_report_is_deterministic(capsys) -> None:
    path = str(PROBLEMS / "klein_cup.json")
    _, first = run_cli(capsys, "run", path, "--threads", "1")
    _, second = run_cli(capsys, "run", path, "--threads", "2")
    assert first == second
    _, timed = run_json(capsys, "run", path, "--timing")
    assert "seconds" in timed["timing"]


def test_schema_violation_reports_path(tmp_path, capsys) -> None:
    problem = tmp_path / "bad.json"
    problem.write_text(json.dumps({"kind": "brauer", "n": "four", "p": 2, "generators": []}), encoding="utf-8")
    code, report = run_json(capsys, "run", str(problem))
    assert code == 4
    assert report["error"]["path"] == "problem.n"


def test_malformed_and_missing_files(tmp_path, capsys) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{\"kind\": ", encoding="utf-8")
    code, report = run_json(capsys, "run", str(broken))
    assert code == 4
    assert report["error"]["error"] == "InputError"
    code, _ = run_json(capsys, "run", str(tmp_path / "missing.json"))
    assert code == 4


def test_failed_suite_reports_witness(monkeypatch, capsys) -> None:
    failing = suite_result("dwyer", [check_record("ok", True), check_record("broken", False, {"sigma": 1})])
    monkeypatch.setitem(app.SUITE_RUNNERS, "dwyer", lambda extended: failing)
    code, report = run_json(capsys, "suite", "dwyer")
    assert code == 2
    assert report["witness"]["name"] == "broken"
    assert report["results"]["passed"] is False


def test_consistency_error_is_check_failure(monkeypatch, capsys) -> None:
    def explode(args):
        raise ConsistencyError("расхождение", witness={"g": 0})

    monkeypatch.setitem(app.COMMANDS, "exponent", explode)
    code, report = run_json(capsys, "exponent", "--n", "3", "--p", "2")
    assert code == 2
    assert report["error"]["witness"] == {"g": 0}


def test_pretty_output(capsys) -> None:
    code, out = run_cli(capsys, "run", str(PROBLEMS / "e_n4.json"), "--pretty")
    assert code == 0
    assert out.startswith("run (")
    assert "formula" in out


def test_run_brauer_reports_violated_inclusion(capsys, monkeypatch) -> None:
    monkeypatch.setattr(formula, "_contained", lambda *args: False)
    code, report = run_json(capsys, "run", str(PROBLEMS / "e_n4.json"))
    assert code == 2
    assert report["error"]["witness"]["violated"] == ["sandwich", "b0_contains_formula"]
