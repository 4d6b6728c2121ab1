import dataclasses

import pytest

from modules.brauer import formula
from modules.brauer.formula import b0_kernel, check_report, evaluate_formula
from modules.brauer.module import E_N4_GENERATORS
from modules.brauer.problem import build_problem, dual_B, dual_B0
from modules.brauer.scan import sampled_subgroups, sandwich_scan, subspace_count, subspaces
from utils.errors import ConsistencyError, InputError


def test_subspace_enumeration() -> None:
    assert subspace_count(3, 2) == 16
    assert subspace_count(2, 3) == 6
    assert len(list(subspaces(3, 2))) == 16
    assert len({b.tobytes() + bytes([b.shape[0]]) for b in subspaces(2, 3)}) == 6


@pytest.mark.parametrize("n,rank", [(3, 3), (4, 5), (5, 7)])
def test_dual_ranks(n: int, rank: int) -> None:
    problem = build_problem(n, 2, [])
    assert dual_B(problem).rank == rank
    assert dual_B0(problem).rank <= rank
    assert dual_B(problem).pairing_ok()


def test_b0_equals_b_for_n3() -> None:
    problem = build_problem(3, 2, [((1, 0, 1), 1)])
    assert dual_B(problem).positions == dual_B0(problem).positions
    report = evaluate_formula(problem)
    assert report.b0_kernel_dim == 0


def test_trivial_group_has_no_cohomology() -> None:
    report = evaluate_formula(build_problem(4, 2, []))
    assert report.order == 1
    assert report.h1_dim == report.sha_dim == report.formula_dim == 0
    assert report.sandwich


def test_n4_example() -> None:
    problem = build_problem(4, 2, E_N4_GENERATORS)
    report = evaluate_formula(problem)
    assert problem.order == 4
    assert report.sha_dim == report.formula_dim == 1
    assert report.sha_b0_dim == 0
    assert report.b0_contains_formula
    assert not report.power_conditions_change
    assert b0_kernel(problem).shape[0] == report.b0_kernel_dim


def test_violated_properties_raise() -> None:
    problem = build_problem(4, 2, E_N4_GENERATORS)
    report = evaluate_formula(problem)
    check_report(problem, report)
    broken = dataclasses.replace(report, sandwich=False)
    with pytest.raises(ConsistencyError) as info:
        check_report(problem, broken)
    assert info.value.witness["violated"] == ["sandwich"]
    assert info.value.witness["order"] == 4
    with pytest.raises(ConsistencyError) as info:
        check_report(problem, dataclasses.replace(report, nopthroot=False, b0_contains_formula=False))
    assert info.value.witness["violated"] == ["b0_contains_formula", "nopthroot"]
    # вне 3 <= n <= 6 включение не утверждается
    check_report(problem, dataclasses.replace(report, b0_contains_formula=None))


def test_evaluate_formula_raises_on_failed_inclusion(monkeypatch) -> None:
    monkeypatch.setattr(formula, "_contained", lambda *args: False)
    with pytest.raises(ConsistencyError) as info:
        evaluate_formula(build_problem(4, 2, E_N4_GENERATORS))
    assert info.value.witness["violated"] == ["sandwich", "b0_contains_formula"]


def test_build_problem_rejects_bad_input() -> None:
    with pytest.raises(InputError):
        build_problem(2, 2, [])
    with pytest.raises(InputError) as info:
        build_problem(3, 2, [((1, 0), 1)])
    assert info.value.path == "generators[0]"
    with pytest.raises(InputError):
        build_problem(3, 3, [((1, 0, 0), 0)])


def test_scan_n3_formula_vanishes() -> None:
    frame = sandwich_scan(3, 2, policy="exhaustive")
    assert len(frame) == 16
    assert (frame["formula"] == 0).all()
    assert frame["sandwich"].all()


@pytest.mark.slow
def test_scan_n3_odd_prime_nopthroot() -> None:
    frame = sandwich_scan(3, 3, policy="exhaustive")
    surjective = frame[frame["chi_surjective"]]
    assert not surjective.empty
    assert (surjective["h1"] == 0).all()
    assert surjective["nopthroot"].all()
    assert (frame["sha_b0"] == 0).all()


def test_scan_policy_and_sampling() -> None:
    with pytest.raises(InputError):
        sandwich_scan(3, 2, policy="random")
    first = list(sampled_subgroups(4, 3, 5, seed=11))
    assert first == list(sampled_subgroups(4, 3, 5, seed=11))
    assert len(first) == 5
