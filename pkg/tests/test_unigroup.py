import numpy as np
import pytest

from modules.unigroup import prs
from modules.unigroup.pattern import MatrixQuotient, centre_pattern, make_pattern, u1_pattern
from modules.unigroup.prs import prs_check, rho_eval, s_group
from modules.unigroup.triw import aw_split_check, build_TW, degeneration_check, u8_diagram_check
from modules.unigroup.unitri import (
    AVec, BVec, UniTri, a_act_on_B, all_avecs, b_action_matrix, commutator, elem_gen, inv, lcs_level,
    mul, power, random_unitri, tau, tau_A, tau_B, to_A, to_B,
)
from utils.errors import InputError


def test_elem_gen_and_inverse() -> None:
    x = elem_gen(3, 5, 0, 2, 3)
    assert x.entry(0, 2) == 3
    assert mul(x, inv(x)).is_identity()
    assert power(x, 5).is_identity()
    with pytest.raises(InputError):
        elem_gen(3, 5, 2, 1)


def test_mul_rejects_different_groups() -> None:
    with pytest.raises(InputError):
        mul(elem_gen(3, 2, 0, 1), elem_gen(3, 3, 0, 1))


def test_commutator_of_neighbours() -> None:
    c = commutator(elem_gen(3, 3, 0, 1), elem_gen(3, 3, 1, 2))
    assert c == elem_gen(3, 3, 0, 2)
    assert lcs_level(c) == 1
    assert lcs_level(UniTri.identity(3, 3)) == 3


def test_to_A_is_homomorphism() -> None:
    rng = np.random.default_rng(1)
    for _ in range(20):
        x, y = random_unitri(4, 3, rng), random_unitri(4, 3, rng)
        assert to_A(mul(x, y)) == to_A(x) + to_A(y)


def test_to_B_requires_u1() -> None:
    assert to_B(elem_gen(3, 2, 0, 2)) == BVec.from_dict(3, 2, {(0, 2): 1})
    with pytest.raises(InputError):
        to_B(elem_gen(3, 2, 0, 1))


def test_tau_is_involutive_automorphism() -> None:
    rng = np.random.default_rng(2)
    for _ in range(20):
        x, y = random_unitri(4, 3, rng), random_unitri(4, 3, rng)
        assert tau(tau(x)) == x
        assert tau(mul(x, y)) == mul(tau(x), tau(y))
        assert to_A(tau(x)) == tau_A(to_A(x))


def test_tau_B_matches_tau_on_u1() -> None:
    x = mul(elem_gen(4, 3, 0, 2), elem_gen(4, 3, 1, 4, 2))
    assert to_B(tau(x)) == tau_B(to_B(x))


@pytest.mark.parametrize("n,p", [(3, 2), (4, 2), (4, 3), (5, 2)])
def test_b_action_methods_agree(n: int, p: int) -> None:
    for s in all_avecs(n, p):
        assert np.array_equal(b_action_matrix(s, "conjugation"), b_action_matrix(s, "generators"))


def test_a_act_on_B_is_action() -> None:
    p, n = 3, 4
    b = BVec(n, p, (1, 2, 0, 1, 1))
    s, t = AVec(p, (1, 0, 2, 1)), AVec(p, (0, 1, 1, 2))
    assert a_act_on_B(s + t, b) == a_act_on_B(s, a_act_on_B(t, b))
    assert a_act_on_B(AVec(p, (0, 0, 0, 0)), b) == b
    with pytest.raises(InputError):
        a_act_on_B(AVec(p, (1, 0, 0)), b)


def test_matrix_quotient_by_centre() -> None:
    quotient = MatrixQuotient(3, 2, centre_pattern(3))
    z = elem_gen(3, 2, 0, 3).to_matrix()
    assert quotient.contains(z)
    x = elem_gen(3, 2, 0, 1).to_matrix()
    assert quotient.equal(quotient.mul(x, z), x)


def test_make_pattern_rejects_non_normal() -> None:
    with pytest.raises(InputError):
        make_pattern(3, {(1, 2)})
    assert u1_pattern(3) >= centre_pattern(3)


@pytest.mark.parametrize("n,p,r,s", [(3, 2, 1, 1), (4, 2, 1, 2), (4, 3, 2, 2), (5, 2, 3, 1)])
def test_prs_check_passes(n: int, p: int, r: int, s: int) -> None:
    report = prs_check(n, p, r, s)
    assert report["passed"]
    assert report["order"] == p ** (r + s + 1)


def test_prs_check_rejects_out_of_range() -> None:
    with pytest.raises(InputError):
        prs_check(4, 2, 3, 1)


def test_rho_eval_on_centre_and_outside() -> None:
    u, v = [1, 0, 0, 0, 0], [0, 0, 0, 0, 1]
    z = elem_gen(4, 2, 0, 4)
    assert rho_eval(u, v, z, 1, 2, 2) == 1
    assert rho_eval(u, v, UniTri.identity(4, 2), 1, 2, 2) == 0
    with pytest.raises(InputError):
        rho_eval(u, v, elem_gen(4, 2, 1, 2), 1, 2, 2)


@pytest.mark.parametrize("r,s", [(1, 2), (2, 1)])
def test_s_group_extends_retraction(r: int, s: int) -> None:
    report = s_group([1, 0, 0, 0, 0], [0, 0, 0, 0, 1], 4, 2, r, s)
    assert report["passed"]
    assert report["order"] >= 2 ** (r + s + 1)
    assert {c["name"]: c["passed"] for c in report["checks"]}["extension_restricts_to_rho"]


def test_s_group_extension_check_uses_rho(monkeypatch) -> None:
    # обнулённое продолжение на S не совпадает с ρ_{u,v} на e_{0,4}
    monkeypatch.setattr(prs, "_batch_rho", lambda u, v, mats, p: np.zeros(mats.shape[:-2], dtype=np.int64))
    report = s_group([1, 0, 0, 0, 0], [0, 0, 0, 0, 1], 4, 2, 1, 2)
    passed = {c["name"]: c["passed"] for c in report["checks"]}
    assert not passed["extension_restricts_to_rho"]
    assert not report["passed"]


def test_aw_split_and_diagram() -> None:
    assert aw_split_check(build_TW(3, 8))["passed"]
    diagram = u8_diagram_check(8)
    assert all(check["passed"] for check in diagram["checks"])
    assert diagram["order_U"] == 8 ** 6
    by_name = {check["name"]: check for check in diagram["checks"]}
    assert by_name["right_column_splits"]["detail"] == {"image": 8 ** 3, "kernel": 8}
    assert by_name["squares_commute"]["detail"] == {"top": True, "bottom": True}


@pytest.mark.parametrize("m", [2, 4])
def test_diagram_at_small_modulus(m: int) -> None:
    diagram = u8_diagram_check(m)
    assert all(check["passed"] for check in diagram["checks"]), diagram["checks"]
    assert diagram["order_P"] == m ** 4
    assert diagram["order_U1"] == m ** 3


@pytest.mark.parametrize("n,p", [(3, 2), (3, 3)])
def test_triw_degenerates_at_prime(n: int, p: int) -> None:
    assert degeneration_check(n, p)["passed"]
