import numpy as np
import pytest

from modules.conjact.classes import conj_classes, orbit_class_count, spot_check_classes
from modules.conjact.exponent import outer_exponent, power_class_map, unit_kernel_generators
from modules.conjact.invariants import (
    ActionTables, act_on_class, build_tables, fixed_classes, image_span_in_B, lemma_b2_witness,
    theta_surjectivity, verify_aide, verify_lemma_b2, verify_tau_equivariance,
)
from modules.conjact.union_find import UnionFind
from modules.unigroup.unitri import AVec, BVec, all_avecs
from utils.errors import BudgetExceeded, InputError


def test_union_find_merges() -> None:
    uf = UnionFind(range(5))
    uf.union(0, 1)
    uf.union(3, 4)
    uf.union(1, 4)
    assert uf.find(0) == uf.find(3)
    assert uf.find(2) != uf.find(0)


def test_abelian_u1_has_singleton_classes() -> None:
    classes = conj_classes(3, 2)
    assert classes.count == 8


def test_class_count_matches_orbit_oracle() -> None:
    classes = conj_classes(4, 2)
    assert classes.count == orbit_class_count(4, 2)
    assert spot_check_classes(classes)["passed"]


def test_class_budget() -> None:
    with pytest.raises(BudgetExceeded):
        conj_classes(5, 3, max_elems=100)


@pytest.mark.parametrize("n,p", [(3, 2), (3, 3), (4, 2), (4, 3), pytest.param(5, 2, marks=pytest.mark.slow)])
def test_outer_exponent_is_p(n: int, p: int) -> None:
    result = outer_exponent(n, p)
    assert result.outer_exponent == p
    assert result.exponent % p == 0
    assert not result.unproven_range


def test_outer_exponent_small_n() -> None:
    assert outer_exponent(2, 5).outer_exponent == 5


def test_unit_kernel_generators_are_congruent_to_one() -> None:
    for g in unit_kernel_generators(3, 1, 3):
        assert g % 3 == 1


def test_power_map_identity_at_one() -> None:
    classes = conj_classes(4, 2)
    assert np.array_equal(power_class_map(classes, 1), np.arange(classes.count))


def test_act_on_class_and_fixed_classes() -> None:
    tables = build_tables(4, 3)
    zero = AVec(3, (0, 0, 0, 0))
    assert len(fixed_classes(tables, zero)) == tables.classes.count
    s = AVec(3, (1, 2, 0, 1))
    for c in range(0, tables.classes.count, 7):
        image = act_on_class(tables, s, c)
        assert 0 <= image < tables.classes.count
    with pytest.raises(InputError):
        act_on_class(tables, s, tables.classes.count)


@pytest.mark.parametrize("n,p", [(4, 2), (4, 3)])
def test_image_span_is_fixed_space(n: int, p: int) -> None:
    tables = build_tables(n, p)
    for s in all_avecs(n, p):
        span = image_span_in_B(tables, s)
        assert span.contains_b0_fixed
        assert span.equals_fixed


def test_lemma_b2_witness_and_invalid_input() -> None:
    tables = build_tables(4, 2)
    s = AVec(2, (0, 0, 0, 0))
    b = BVec.from_dict(4, 2, {(0, 2): 1, (2, 4): 1})
    c = lemma_b2_witness(tables, s, b)
    assert int(tables.table(s)[c]) == c
    with pytest.raises(InputError):
        lemma_b2_witness(tables, s, BVec.from_dict(4, 2, {(0, 3): 1}))


def test_exhaustive_verifiers_small() -> None:
    tables = ActionTables(conj_classes(4, 3))
    assert verify_aide(tables, exhaustive=True)["passed"]
    assert verify_lemma_b2(tables)["passed"]
    assert verify_tau_equivariance(tables)["passed"]


@pytest.mark.parametrize("p", [2, 3])
def test_theta_surjectivity(p: int) -> None:
    report = theta_surjectivity(p, [1, 1, 0, 0])
    assert report["passed"]
    with pytest.raises(InputError):
        theta_surjectivity(p, [0, 0, 0, 0])
