"""
Модуль наборов проверок для групп U, P^{r,s} и T(W)
Отвечает за наборы prs и generalized
"""

import logging
from typing import Dict

from config.settings import SUITE_PARAMS
from modules.massey.module import degeneration_records
from modules.unigroup.prs import prs_check, s_group
from modules.unigroup.triw import aw_split_check, build_TW, degeneration_check
from utils.helpers import nested_record, progress, suite_result

logger = logging.getLogger(__name__)


def unit_vector(size: int, index: int):
    vec = [0] * size
    vec[index] = 1
    return vec


def run_prs_suite(extended: bool = False) -> Dict:
    """
    Набор prs: свойства P^{r,s} при n <= 5, p <= 3 и подгруппа S при (4, 2, 1, 2), (4, 2, 2, 1)

    Возвращает:
    - результат набора со списком проверок
    """
    checks = []
    cases = [(n, p, r, s)
             for n in range(3, SUITE_PARAMS["prs_max_n"] + 1)
             for p in SUITE_PARAMS["prs_primes"]
             for r in range(1, n - 1)
             for s in range(1, n - 1)]
    for n, p, r, s in progress(cases, desc="prs_check"):
        report = prs_check(n, p, r, s)
        checks.append(nested_record(f"prs_check(n={n},p={p},r={r},s={s})", report))
    for n, p, r, s in ((4, 2, 1, 2), (4, 2, 2, 1)):
        report = s_group(unit_vector(n + 1, 0), unit_vector(n + 1, n), n, p, r, s)
        record = nested_record(f"s_group(n={n},p={p},r={r},s={s})", report)
        record["order"] = report["order"]
        checks.append(record)
    logger.info(f"набор prs: {sum(c['passed'] for c in checks)}/{len(checks)} проверок пройдено")
    return suite_result("prs", checks)


def run_generalized_suite(extended: bool = False) -> Dict:
    """
    Набор generalized: A(W) и диаграмма при (n, m) = (3, 8), вырождение T(W) в U при простом m
    """
    checks = []
    for n, m in ((3, 8), (3, 9), (4, 5)):
        report = aw_split_check(build_TW(n, m))
        checks.append(nested_record(f"aw_split_check(n={n},m={m})", report))
    for n, p in ((3, 2), (3, 3), (4, 2)):
        checks.append(nested_record(f"degeneration(n={n},p={p})", degeneration_check(n, p)))
    checks.extend(degeneration_records())
    return suite_result("generalized", checks)
