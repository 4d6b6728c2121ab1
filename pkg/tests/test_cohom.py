import numpy as np
import pytest

from modules.cohom.cup import coboundary2, coboundary2_test, cup11
from modules.cohom.gmodule import from_generator_matrices, trivial
from modules.cohom.groups import FiniteGroup, cyclic, named_group
from modules.cohom.h1 import h1, h1_order_brute, restrict_h1, sha1_cyc
from modules.cohom.h2 import bogomolov, h2_bar, h2_qz
from modules.cohom.lifting import (
    TableStep, lift_abelian_kernel, quotient_homs, solve_embedding, verify_embedding, verify_solver,
)
from modules.cohom.groups import small_two_groups
from modules.cohom.module import solver_kernels
from modules.unigroup.pattern import centre_pattern, u1_pattern
from utils.errors import InputError, UnsupportedError


def test_group_basics(d4, q8) -> None:
    assert d4.order == 8 and d4.exponent() == 4
    assert not q8.is_abelian()
    assert q8.primes() == [2]


def test_group_table_validation() -> None:
    with pytest.raises(InputError):
        FiniteGroup([[0, 1], [0, 1]])


def test_named_group_product_and_unknown_type() -> None:
    spec = {"type": "product", "factors": [{"type": "cyclic", "n": 2}, {"type": "cyclic", "n": 3}]}
    assert named_group(spec).order == 6
    with pytest.raises(InputError) as info:
        named_group({"type": "free"})
    assert info.value.path == "group.type"


def test_h1_trivial_coefficients(z2, klein, d4) -> None:
    assert h1(trivial(z2, 2)).dimension == 1
    assert h1(trivial(klein, 2)).dimension == 2
    assert h1(trivial(d4, 2)).dimension == 2
    assert h1(trivial(cyclic(4), 4)).invariants == [4]


def test_h1_twisted_matches_brute_force(z2) -> None:
    sign = from_generator_matrices(z2, 4, {1: np.array([[3]])})
    assert h1(sign).order == h1_order_brute(sign) == 2


def test_restriction_to_factor(klein) -> None:
    module = trivial(klein, 2)
    restriction = restrict_h1(module, [0, 1])
    assert restriction.matrix.shape == (1, 2)
    assert not restriction.is_injective()
    assert restriction.kernel().shape[0] == 1


def test_sha1_cyc_vanishes(klein, q8) -> None:
    assert sha1_cyc(trivial(klein, 2)).order == 1
    assert sha1_cyc(trivial(q8, 2)).order == 1


def test_cup_products_on_klein(klein) -> None:
    module = trivial(klein, 2)
    a, b = h1(module).reps
    ab = cup11(a, module, b, module)
    ba = cup11(b, module, a, module)
    assert coboundary2_test(module, ab) is None
    f = coboundary2_test(module, np.mod(ab + ba, 2))
    assert f is not None
    assert np.array_equal(coboundary2(module, f), np.mod(ab + ba, 2))


def test_cup_rejects_different_moduli(z2) -> None:
    with pytest.raises(InputError):
        cup11(np.zeros((2, 1)), trivial(z2, 2), np.zeros((2, 1)), trivial(z2, 4))


def test_coboundary2_test_rejects_non_cocycle(z2) -> None:
    c = np.zeros((2, 2, 1), dtype=np.int64)
    c[0, 0, 0] = 1
    with pytest.raises(InputError):
        coboundary2_test(trivial(z2, 2), c)


def test_h2_bar_dimensions(z4, klein) -> None:
    assert h2_bar(trivial(klein, 2)).dimension == 3
    assert h2_bar(trivial(z4, 2)).dimension == 1
    assert h2_bar(trivial(cyclic(3), 2)).dimension == 0
    with pytest.raises(UnsupportedError):
        h2_bar(trivial(z4, 4))


def test_h2_qz_schur_multipliers(z4, klein, d4, q8) -> None:
    assert h2_qz(klein) == {2: [2]}
    assert h2_qz(z4) == {2: []}
    assert h2_qz(d4) == {2: [2]}
    assert h2_qz(q8) == {2: []}


def test_bogomolov_small_groups(klein, d4, q8) -> None:
    for group in (klein, d4, q8):
        result = bogomolov(group)
        assert result.trivial
        assert result.order == group.order


def test_lift_through_table_step(z2, z4) -> None:
    step = TableStep(z4, z2, [0, 1, 0, 1])
    assert not lift_abelian_kernel(z2, step, [0, 1]).lifted
    result = lift_abelian_kernel(z4, step, [0, 1, 0, 1], mode="all")
    assert result.lifted
    assert len(result.lifts) == 2
    with pytest.raises(InputError):
        TableStep(z4, z2, [0, 0, 1, 1])


def test_embedding_obstructed_and_solvable(z2, z4) -> None:
    alpha = {1: np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]])}
    pattern = centre_pattern(2)
    obstructed = solve_embedding(z2, 2, 2, pattern, alpha)
    assert obstructed.status == "unsolvable"
    solved = solve_embedding(z4, 2, 2, pattern, alpha)
    assert solved.solved
    assert verify_embedding(z4, 2, 2, pattern, alpha, solved)


def test_embedding_tree_search_agrees_with_brute_force(z2, z4, klein, q8) -> None:
    alpha = {1: np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]])}
    tree = solve_embedding(z4, 2, 2, centre_pattern(2), alpha, allow_brute_force=False)
    assert tree.solved and tree.method == "tree"
    assert verify_embedding(z4, 2, 2, centre_pattern(2), alpha, tree)
    kernels = {"centre": centre_pattern(3), "u1": u1_pattern(3)}
    report = verify_solver([z2, z4, klein, q8], 3, 2, kernels)
    assert report["passed"], report["witnesses"]
    assert report["mismatches"] == 0
    assert 0 < report["solvable"] < report["instances"]


def test_quotient_homs_counts(z2) -> None:
    # U/Z при n = 2 есть (Z/2)^2, каждый элемент порядка <= 2
    assert len(quotient_homs(z2, 2, 2, centre_pattern(2))) == 4
    assert len(quotient_homs(z2, 2, 2, u1_pattern(2))) == 4


@pytest.mark.slow
def test_embedding_solver_matches_oracle_on_small_two_groups() -> None:
    report = verify_solver(small_two_groups(), 3, 2, solver_kernels(3))
    assert report["passed"], report["witnesses"]
    assert report["instances"] > 1000


def test_embedding_rejects_composite_modulus(z2) -> None:
    with pytest.raises(UnsupportedError):
        solve_embedding(z2, 2, 6, centre_pattern(2), {1: np.eye(3, dtype=np.int64)})
