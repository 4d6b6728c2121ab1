import io
import json

import numpy as np
import pytest

from config.settings import BUDGET_CONFIG
from modules.base.problem_loader import load_problem, parse_problem_text
from modules.reports.report import build_report, error_report, render_report, used_budgets
from modules.reports.tables import checks_table, render_pretty, scalar_table
from utils.errors import BudgetExceeded, InputError
from utils.helpers import (
    budget, budget_scope, canonical_json, check_record, digest, ensure_budget, first_failure, nested_record, parallel_map,
    suite_result, thread_count, to_jsonable,
)


def test_to_jsonable_converts_numpy_and_sets() -> None:
    data = {"a": np.int64(3), "b": np.array([[1, 2]]), "c": frozenset({2, 1}), "d": (np.bool_(True),)}
    assert to_jsonable(data) == {"a": 3, "b": [[1, 2]], "c": [1, 2], "d": [True]}


def test_digest_ignores_key_order() -> None:
    assert digest({"x": 1, "y": [1, 2]}) == digest({"y": [1, 2], "x": 1})
    assert canonical_json({"b": 1, "a": 2}) == '{"a": 2, "b": 1}'


def test_budget_helpers(monkeypatch) -> None:
    assert ensure_budget("max_nodes", 10) == BUDGET_CONFIG["max_nodes"]
    with pytest.raises(BudgetExceeded) as info:
        ensure_budget("max_nodes", 11, override=10)
    assert info.value.to_dict()["required"] == 11
    with pytest.raises(InputError):
        ensure_budget("no_such_budget", 1)
    monkeypatch.setenv("MASSEYLAB_THREADS", "3")
    assert thread_count() == 3
    assert thread_count(0) == 1
    assert parallel_map(lambda x: x * x, range(6), workers=3) == [0, 1, 4, 9, 16, 25]


def test_budget_scope_applies_and_restores(monkeypatch) -> None:
    monkeypatch.delenv("MASSEYLAB_THREADS", raising=False)
    with budget_scope(threads=2, max_elems=5, max_nodes=None):
        assert budget("max_elems") == 5
        assert budget("max_nodes") == BUDGET_CONFIG["max_nodes"]
        assert budget("max_elems", 7) == 7
        assert thread_count() == 2
        with pytest.raises(BudgetExceeded):
            ensure_budget("max_elems", 6)
    assert budget("max_elems") == BUDGET_CONFIG["max_elems"]
    assert thread_count() == 1
    with pytest.raises(InputError):
        with budget_scope(no_such_budget=1):
            pass


def test_check_records() -> None:
    checks = [check_record("a", True), check_record("b", False, {"w": np.int64(1)})]
    assert first_failure(checks)["detail"] == {"w": 1}
    result = suite_result("demo", checks)
    assert not result["passed"]
    nested = nested_record("demo", result)
    assert not nested["passed"] and nested["detail"]["name"] == "b"


def test_report_fields_and_budgets() -> None:
    command = {"name": "exponent", "n": 3, "p": 2}
    report = build_report(command, {"value": np.int64(2)}, budgets={"max_nodes": 5, "max_elems": None})
    assert report["results"] == {"value": 2}
    assert report["budgets"]["max_nodes"] == 5
    assert report["budgets"]["max_elems"] == BUDGET_CONFIG["max_elems"]
    assert "timing" not in report
    assert used_budgets() == BUDGET_CONFIG
    assert json.loads(render_report(report)) == report
    timed = build_report(command, {}, timing={"seconds": 0.1234567})
    assert timed["timing"] == {"seconds": 0.123457}


def test_error_report() -> None:
    report = error_report({"name": "run"}, InputError("плохо", path="problem.n").to_dict())
    assert report["results"] is None
    assert report["error"]["path"] == "problem.n"


def test_tables() -> None:
    frame = checks_table(suite_result("demo", [check_record("a", True), check_record("b", False)]))
    assert list(frame["результат"]) == ["pass", "FAIL"]
    flat = scalar_table({"x": 1, "nested": {"y": 2}, "rows": [1, 2], "matrix": [[1]]})
    assert set(flat["поле"]) == {"x", "nested.y", "rows"}
    text = render_pretty({"command": {"name": "suite"}, "version": "1", "results": {"checks": []}})
    assert text.splitlines()[0] == "suite (1)"


def test_problem_loader(tmp_path, monkeypatch) -> None:
    text = json.dumps({"kind": "group", "group": {"type": "cyclic", "n": 3}})
    assert parse_problem_text(text)["kind"] == "group"
    with pytest.raises(InputError):
        parse_problem_text("[1, 2")
    with pytest.raises(InputError) as info:
        parse_problem_text(json.dumps({"kind": "brauer", "n": 4, "p": 2, "generators": [{"b": [1]}]}))
    assert info.value.path.startswith("problem.generators[0]")
    with pytest.raises(InputError):
        parse_problem_text(json.dumps({"kind": "unknown"}))
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    assert load_problem("-")["group"]["n"] == 3
    path = tmp_path / "p.json"
    path.write_text(text, encoding="utf-8")
    assert load_problem(str(path)) == json.loads(text)
