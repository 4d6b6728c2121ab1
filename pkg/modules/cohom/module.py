"""
Модуль набора проверок bogomolov
Отвечает за мультипликатор Богомолова U¹ при малых (n, p) и за контрольные
вычисления H¹, H², Ш¹_cyc и подъёмов на маленьких группах
"""

import logging
from typing import Dict, List

import numpy as np

from config.settings import SUITE_PARAMS
from modules.cohom.cup import coboundary2_test, cup11
from modules.cohom.gmodule import from_generator_matrices, trivial
from modules.cohom.groups import cyclic, direct_product, elementary_abelian, small_two_groups, unitriangular_u1
from modules.cohom.h1 import h1, h1_order_brute, sha1_cyc
from modules.cohom.h2 import bogomolov, h2_bar, h2_qz
from modules.cohom.lifting import TableStep, lift_abelian_kernel, verify_solver
from modules.unigroup.pattern import centre_pattern, lcs_pattern, prs_pattern, u1_pattern
from utils.helpers import check_record, progress, suite_result

logger = logging.getLogger(__name__)


def cohomology_checks() -> List[Dict]:
    """Контрольные значения на группах порядка <= 8"""
    checks = []
    z2 = cyclic(2)
    klein = elementary_abelian(2, 2)
    checks.append(check_record("h1(Z/2, F_2) = 1", h1(trivial(z2, 2)).dimension == 1))
    sign = from_generator_matrices(z2, 4, {1: np.array([[3]])}, name="Z/4(-1)")
    basis = h1(sign)
    checks.append(check_record("h1(Z/2, Z/4 со знаком) = Z/2", basis.invariants == [2]
                               and h1_order_brute(sign) == 2, {"invariants": basis.invariants}))
    checks.append(check_record("h2((Z/2)^2, F_2) = 3", h2_bar(trivial(klein, 2)).dimension == 3))
    qz = h2_qz(klein)
    checks.append(check_record("H2((Z/2)^2, Q/Z) = Z/2", qz == {2: [2]}, qz))
    cyclic_qz = h2_qz(cyclic(4))
    checks.append(check_record("H2(Z/4, Q/Z) = 0", cyclic_qz == {2: []}, cyclic_qz))
    for group in (cyclic(4), klein):
        sha = sha1_cyc(trivial(group, 2))
        checks.append(check_record(f"sha1_cyc({group.name}, F_2) = 0", sha.order == 1))
    chi = h1(trivial(z2, 2)).reps[0]
    square = cup11(chi, trivial(z2, 2), chi, trivial(z2, 2))
    checks.append(check_record("cup-квадрат характера Z/2 нетривиален",
                               coboundary2_test(trivial(z2, 2), square) is None
                               and int(square[1, 1, 0]) == 1))
    z4 = cyclic(4)
    step = TableStep(z4, z2, [0, 1, 0, 1])
    obstructed = lift_abelian_kernel(z2, step, [0, 1])
    reduced = lift_abelian_kernel(z4, step, [0, 1, 0, 1])
    checks.append(check_record("Z/2 не поднимается в Z/4", not obstructed.lifted))
    checks.append(check_record("редукция Z/4 → Z/2 поднимается", reduced.lifted))
    return checks


def solver_kernels(n: int) -> Dict:
    return {"centre": centre_pattern(n), "u1": u1_pattern(n), "lcs2": lcs_pattern(n, 2),
            "prs11": prs_pattern(n, 1, 1)}


def solver_checks() -> List[Dict]:
    """Поиск по слоям против перебора на всех ᾱ: Γ → U/K"""
    n, m = SUITE_PARAMS["solver_n"], SUITE_PARAMS["solver_modulus"]
    report = verify_solver(small_two_groups(), n, m, solver_kernels(n))
    return [check_record(f"solve_embedding = перебор (n={n}, m={m}, |Γ| <= 8)", report["passed"], report)]


def run_suite(extended: bool = False) -> Dict:
    """
    Набор bogomolov

    Параметры:
    - extended: не влияет (все случаи укладываются в бюджет h2_full_basis_order)

    Возвращает:
    - результат набора
    """
    checks = cohomology_checks()
    checks.extend(solver_checks())
    abelian = [elementary_abelian(2, 2), direct_product(cyclic(4), cyclic(2)), elementary_abelian(3, 2),
               elementary_abelian(2, 3)]
    for group in abelian:
        result = bogomolov(group)
        checks.append(check_record(f"B0({group.name}) = 0", result.trivial, result))
    cases = list(SUITE_PARAMS["bogomolov_cases"])
    for n, p in progress(cases, desc="bogomolov"):
        group, _ = unitriangular_u1(n, p)
        result = bogomolov(group)
        checks.append(check_record(f"B0(U1(n={n},p={p})) = 0", result.trivial, result))
    logger.info(f"набор bogomolov: {sum(c['passed'] for c in checks)}/{len(checks)}")
    return suite_result("bogomolov", checks)
