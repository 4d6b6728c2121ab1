import numpy as np
import pytest

from modules.cohom.cup import cup11
from modules.massey.dwyer import (
    DefiningSystem, count_defining_systems_brute, defining_system_to_hom, hom_to_defining_system,
    massey_value, round_trip,
)
from modules.massey.module import alpha_tuples, dwyer_cases, verify_dwyer
from modules.massey.problem import MasseyProblem, characters_into, problem_from_spec
from modules.massey.products import is_defined, lifts_to_centre_quotient, massey_product_set, vanishes
from modules.cohom.groups import elementary_abelian
from utils.errors import BudgetExceeded, InputError
from utils.helpers import budget_scope


def _klein_characters(klein):
    chars = characters_into(klein, 2)
    g1, g2 = klein.generators
    chi1 = next(c for c in chars if c[g1] == 1 and c[g2] == 0)
    chi2 = next(c for c in chars if c[g1] == 0 and c[g2] == 1)
    return chi1, chi2


def test_characters_into(z4, klein) -> None:
    assert len(characters_into(z4, 2)) == 2
    assert len(characters_into(klein, 2)) == 4


def test_cup_product_as_massey_value(klein) -> None:
    chi1, chi2 = _klein_characters(klein)
    problem = MasseyProblem(klein, 2, 2, [chi1, chi2])
    lifts = lifts_to_centre_quotient(problem)
    system = hom_to_defining_system(problem, lifts[0])
    value = massey_value(system)
    assert not value.trivial and value.agrees
    module = problem.module(0, 2)
    assert np.array_equal(value.cocycle, np.mod(-cup11(chi1, module, chi2, module), 2))
    assert is_defined(problem) and not vanishes(problem)


def test_square_of_character(z2, z4) -> None:
    chi = characters_into(z2, 2)[1]
    assert not vanishes(MasseyProblem(z2, 2, 2, [chi, chi]))
    # в Z/4 квадрат характера - кограница
    psi = characters_into(z4, 2)[1]
    assert vanishes(MasseyProblem(z4, 2, 2, [psi, psi]))


def test_triple_product_undefined_when_cup_nonzero(z2) -> None:
    chi = characters_into(z2, 2)[1]
    problem = MasseyProblem(z2, 3, 2, [chi, chi, chi])
    assert not is_defined(problem)
    assert not vanishes(problem)
    pset = massey_product_set(problem)
    assert not pset.defined
    assert pset.raw_count == 0


def test_zero_tuple_defined_and_vanishing(klein) -> None:
    zero = characters_into(klein, 2)[0]
    problem = MasseyProblem(klein, 3, 2, [zero] * 3)
    pset = massey_product_set(problem)
    assert pset.defined and pset.contains_zero
    assert count_defining_systems_brute(problem) == pset.raw_count
    assert pset.bucket_count <= pset.raw_count


def test_dwyer_round_trip(z4) -> None:
    psi = characters_into(z4, 2)[1]
    problem = MasseyProblem(z4, 3, 2, [psi, psi, psi])
    lifts = lifts_to_centre_quotient(problem)
    assert lifts
    assert all(round_trip(problem, images) for images in lifts)


def test_defining_system_to_hom_rejects_broken_system(klein) -> None:
    chi1, chi2 = _klein_characters(klein)
    problem = MasseyProblem(klein, 2, 2, [chi1, chi2])
    system = hom_to_defining_system(problem, lifts_to_centre_quotient(problem)[0])
    broken = dict(system.cochains)
    broken[(0, 1)] = np.mod(broken[(0, 1)] + chi2, 2)
    with pytest.raises(InputError):
        defining_system_to_hom(DefiningSystem(problem=problem, cochains=broken))


def test_problem_validation(z2) -> None:
    with pytest.raises(InputError):
        MasseyProblem(z2, 1, 2, [np.array([0, 1])])
    with pytest.raises(InputError):
        MasseyProblem(z2, 2, 2, [np.array([1, 0]), np.array([0, 1])])
    with pytest.raises(InputError):
        MasseyProblem(z2, 2, 4, [np.array([0, 1])] * 2, characters=np.array([[1, 1], [1, 2], [1, 1]]))


def test_problem_from_spec_classical_and_twisted() -> None:
    classical = problem_from_spec({"group": {"type": "cyclic", "n": 2}, "n": 3, "p": 2,
                                   "alphas": [[0], [0], [0]]})
    assert not classical.generalized
    assert is_defined(classical) and vanishes(classical)
    twisted = problem_from_spec({"group": {"type": "cyclic", "n": 2}, "n": 2, "modulus": 4,
                                 "characters": [[1], [3], [1]], "alphas": [[1], [1]]})
    assert twisted.generalized
    pset = massey_product_set(twisted)
    assert pset.defined
    with pytest.raises(InputError) as info:
        problem_from_spec({"group": {"type": "cyclic", "n": 2}, "n": 2, "p": 2, "alphas": [[1, 0], [1]]})
    assert info.value.path == "problem.alphas[0]"


def test_generalized_degenerates_to_classical(z4) -> None:
    psi = characters_into(z4, 2)[1]
    classical = MasseyProblem(z4, 3, 2, [psi] * 3)
    general = MasseyProblem(z4, 3, 2, [psi] * 3, characters=np.ones((4, 4), dtype=np.int64))
    left, right = massey_product_set(classical), massey_product_set(general)
    assert left.classes == right.classes
    assert left.raw_count == right.raw_count
    assert left.contains_zero == right.contains_zero


def test_dwyer_cases_are_exhaustive_below_four() -> None:
    cases = dwyer_cases()
    assert {n for _, n, _ in cases} == {2, 3}
    assert all(limit is None for _, _, limit in cases)
    assert max(group.order for group, _, _ in cases) == 8
    extended = dwyer_cases(extended=True)
    assert all(limit is not None for _, n, limit in extended if n == 4)


def test_alpha_tuples_cover_every_tuple() -> None:
    group = elementary_abelian(2, 3)
    tuples = alpha_tuples(group, 3, 2)
    assert len(tuples) == 512
    assert len({tuple(a.tobytes() for a in t) for t in tuples}) == 512
    assert len(alpha_tuples(group, 3, 2, limit=64)) == 64
    with budget_scope(max_elems=100):
        with pytest.raises(BudgetExceeded):
            alpha_tuples(group, 3, 2)


@pytest.mark.slow
def test_dwyer_correspondence_on_all_klein_triples(klein) -> None:
    for alphas in alpha_tuples(klein, 3, 2):
        report = verify_dwyer(MasseyProblem(klein, 3, 2, list(alphas)))
        assert report["passed"], report
