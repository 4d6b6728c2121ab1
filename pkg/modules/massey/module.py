"""
Модуль набора проверок dwyer
Отвечает за проверку соответствия Дуайера на группах порядка <= 8,
контрольные примеры значений и вырождение обобщённых коэффициентов
"""

import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import SCAN_CONFIG, SUITE_PARAMS
from modules.cohom.cup import coboundary2_test, cup11
from modules.cohom.groups import FiniteGroup, cyclic, elementary_abelian, small_two_groups
from modules.massey.dwyer import count_defining_systems_brute, hom_to_defining_system, massey_value, round_trip
from modules.massey.problem import MasseyProblem, characters_into
from modules.massey.products import is_defined, lifts_to_centre_quotient, massey_product_set, vanishes
from utils.helpers import check_record, ensure_budget, progress, suite_result

logger = logging.getLogger(__name__)


def alpha_tuples(group: FiniteGroup, n: int, p: int,
                 limit: Optional[int] = None) -> List[Tuple[np.ndarray, ...]]:
    """Наборы характеров (α_0, ..., α_{n-1}): все, либо детерминированная выборка из limit наборов"""
    chars = characters_into(group, p)
    total = len(chars) ** n
    if limit is None:
        ensure_budget("max_elems", total)
    if limit is None or total <= limit:
        return [tuple(t) for t in itertools.product(chars, repeat=n)]
    rng = np.random.default_rng(SCAN_CONFIG["seed"])
    picks = rng.choice(total, size=limit, replace=False)
    out = []
    for code in sorted(int(c) for c in picks):
        digits = []
        for _ in range(n):
            code, d = divmod(code, len(chars))
            digits.append(chars[d])
        out.append(tuple(digits))
    return out


def verify_dwyer(problem: MasseyProblem, brute: bool = True) -> Dict:
    """
    Проверки соответствия Дуайера на одной задаче

    - число определяющих систем (перебор коцепей) = число подъёмов в U/Z;
    - hom → Λ → hom тождественно;
    - is_defined / vanishes согласованы с множеством значений

    Возвращает:
    - отчёт с полем checks
    """
    checks = []
    pset = massey_product_set(problem)
    if brute:
        count = count_defining_systems_brute(problem)
        checks.append(check_record("число определяющих систем = число подъёмов", count == pset.raw_count,
                                   {"systems": count, "lifts": pset.raw_count}))
    lifts = lifts_to_centre_quotient(problem)
    checks.append(check_record("hom → Λ → hom", all(round_trip(problem, images) for images in lifts)))
    defined = is_defined(problem)
    zero = vanishes(problem)
    checks.append(check_record("is_defined ⇔ есть определяющая система", defined == pset.defined))
    checks.append(check_record("vanishes ⇔ 0 во множестве значений", zero == pset.contains_zero))
    return {"checks": checks, "passed": all(c["passed"] for c in checks), "summary": pset.summary()}


def value_examples() -> List[Dict]:
    """Контрольные значения: χ₁ ∪ χ₂ на (Z/2)² и найденный пример "определено, но не нуль" """
    checks = []
    klein = elementary_abelian(2, 2)
    chars = characters_into(klein, 2)
    g1, g2 = klein.generators
    chi1 = next(c for c in chars if c[g1] == 1 and c[g2] == 0)
    chi2 = next(c for c in chars if c[g1] == 0 and c[g2] == 1)
    problem = MasseyProblem(klein, 2, 2, [chi1, chi2], name="klein_cup")
    lifts = lifts_to_centre_quotient(problem)
    value = massey_value(hom_to_defining_system(problem, lifts[0]))
    module = problem.module(0, 2)
    direct = np.mod(-cup11(chi1, module, chi2, module), 2)
    checks.append(check_record("⟨χ₁, χ₂⟩ на (Z/2)² нетривиально", not value.trivial and value.agrees))
    checks.append(check_record("b_{0,2} = -χ₁ ∪ χ₂", np.array_equal(value.cocycle, direct)))
    checks.append(check_record("χ₁ ∪ χ₂ не кограница", coboundary2_test(module, direct) is None))

    z2 = cyclic(2)
    chi = characters_into(z2, 2)[1]
    mined = MasseyProblem(z2, 2, 2, [chi, chi], name="z2_square")
    checks.append(check_record("⟨χ, χ⟩ на Z/2: определено и не обращается в нуль",
                               is_defined(mined) and not vanishes(mined)))
    zero = MasseyProblem(klein, 3, 2, [chars[0]] * 3, name="zero")
    checks.append(check_record("α = 0: определено и обращается в нуль", is_defined(zero) and vanishes(zero)))
    return checks


def _generalized_pair(group: FiniteGroup, n: int, p: int, alphas: Sequence[np.ndarray]):
    classical = MasseyProblem(group, n, p, list(alphas), name="classical")
    ones = np.ones((n + 1, group.order), dtype=np.int64)
    general = MasseyProblem(group, n, p, list(alphas), characters=ones, name="generalized")
    return classical, general


def degeneration_records() -> List[Dict]:
    """
    Вырождение: обобщённые коэффициенты с N_i = F_p и тривиальными характерами
    дают те же подъёмы, значения и множества, что и классический путь
    """
    checks = []
    cases = [(elementary_abelian(2, 2), 3, 2), (cyclic(4), 3, 2), (cyclic(3), 2, 3)]
    for group, n, p in cases:
        chars = characters_into(group, p)
        for alphas in alpha_tuples(group, n, p, 8):
            classical, general = _generalized_pair(group, n, p, alphas)
            left = massey_product_set(classical)
            right = massey_product_set(general)
            same_lifts = all(
                all(np.array_equal(a.images[s], b.images[s]) for s in group.generators)
                for a, b in zip(left.outcomes, right.outcomes))
            same = (left.classes == right.classes and left.raw_count == right.raw_count
                    and left.contains_zero == right.contains_zero and same_lifts)
            checks.append(check_record(
                f"вырождение {group.name}, n={n}, α={[int(a[s]) for a in alphas for s in group.generators]}",
                same, {"classical": left.summary(), "generalized": right.summary()}))
        logger.debug(f"вырождение {group.name}: {len(chars)} характеров")
    return checks


def twisted_examples() -> List[Dict]:
    """Обобщённый случай с нетривиальным действием: Z/2 на Z/4 знаком"""
    checks = []
    z2 = cyclic(2)
    sign = np.array([1, 3], dtype=np.int64)
    one = np.ones(2, dtype=np.int64)
    for alpha_values in ((1, 1), (1, 2), (2, 3)):
        characters = np.array([one, sign, one], dtype=np.int64)
        alphas = [np.array([0, alpha_values[0]]), np.array([0, alpha_values[1]])]
        problem = MasseyProblem(z2, 2, 4, alphas, characters=characters, name="z2_sign")
        pset = massey_product_set(problem)
        lifts = lifts_to_centre_quotient(problem)
        checks.append(check_record(f"Z/2 на Z/4 со знаком, α={alpha_values}: подъёмы и значения согласованы",
                                   pset.defined and all(round_trip(problem, images) for images in lifts),
                                   pset.summary()))
    return checks


def dwyer_cases(extended: bool = False) -> List[Tuple[FiniteGroup, int, Optional[int]]]:
    """(группа, n, предел выборки): n = 2, 3 - все наборы, n = 4 - выборка"""
    cases = [(group, n, None) for group in small_two_groups(SUITE_PARAMS["dwyer_orders"])
             for n in SUITE_PARAMS["dwyer_ns"]]
    if extended:
        cases += [(group, 4, SCAN_CONFIG["samples"]) for group in small_two_groups(4)]
    return cases


def run_suite(extended: bool = False) -> Dict:
    """
    Набор dwyer

    Параметры:
    - extended: добавить n = 4 на группах порядка <= 4

    Возвращает:
    - результат набора
    """
    checks = value_examples()
    for group, n, limit in progress(dwyer_cases(extended), desc="dwyer"):
        tuples = alpha_tuples(group, n, 2, limit)
        failed = None
        for alphas in tuples:
            report = verify_dwyer(MasseyProblem(group, n, 2, list(alphas), name=group.name))
            if not report["passed"]:
                failed = {"alphas": [a.tolist() for a in alphas], "report": report}
                break
        checks.append(check_record(f"соответствие Дуайера {group.name}, n={n} ({len(tuples)} наборов)",
                                   failed is None, failed))
    checks.extend(twisted_examples())
    checks.extend(degeneration_records())
    logger.info(f"набор dwyer: {sum(c['passed'] for c in checks)}/{len(checks)}")
    return suite_result("dwyer", checks)
