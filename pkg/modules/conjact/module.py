"""
Модуль набора проверок conjact
Отвечает за внешний показатель, формулу сопряжения, подъёмы со второй диагонали,
образ неподвижных классов в B^σ и отображение Θ_Q
"""

import logging
from typing import Dict, List, Optional

from config.settings import SUITE_PARAMS
from modules.conjact.classes import conj_classes, orbit_class_count, spot_check_classes
from modules.conjact.exponent import outer_exponent
from modules.conjact.invariants import (
    ActionTables, image_span_in_B, verify_aide, verify_equivariance_to_B, verify_lemma_b2,
    verify_proof_cases, verify_tau_equivariance, verify_well_defined,
)
from modules.unigroup.unitri import all_avecs
from utils.helpers import check_record, progress, suite_result

logger = logging.getLogger(__name__)


def span_checks(tables: ActionTables, require_equal: bool) -> List[Dict]:
    """B_0 ∩ B^σ ⊆ образ ⊆ B^σ для всех σ; при require_equal - равенство образа и B^σ"""
    n, p = tables.n, tables.p
    contains_witness = equal_witness = None
    for s in all_avecs(n, p):
        span = image_span_in_B(tables, s)
        if contains_witness is None and not span.contains_b0_fixed:
            contains_witness = {"s": list(s.coeffs), "dim": span.dim, "b0_fixed_dim": span.b0_fixed_dim}
        if equal_witness is None and not span.equals_fixed:
            equal_witness = {"s": list(s.coeffs), "dim": span.dim, "fixed_dim": span.fixed_dim}
    records = [check_record(f"span_contains_b0_fixed(n={n},p={p})", contains_witness is None, contains_witness)]
    if require_equal:
        records.append(check_record(f"span_equals_fixed(n={n},p={p})", equal_witness is None, equal_witness))
    return records


def exponent_record(n: int, p: int, classes=None, expected: Optional[int] = None) -> Dict:
    result = outer_exponent(n, p, classes=classes)
    passed = True if expected is None else result.outer_exponent == expected
    passed = passed and result.outer_exponent % p == 0 and result.exponent % result.outer_exponent == 0
    record = check_record(f"outer_exponent(n={n},p={p})", passed, result)
    record["value"] = result.outer_exponent
    return record


def run_suite(extended: bool = False) -> Dict:
    """
    Набор conjact

    Параметры:
    - extended: добавить (6, 3) и n = 7

    Возвращает:
    - результат набора
    """
    checks = []
    for p in SUITE_PARAMS["prs_primes"]:
        checks.append(exponent_record(2, p, expected=p))
    cases = sorted(set(SUITE_PARAMS["exponent_cases"]) | set(SUITE_PARAMS["group_theory_cases"]))
    if extended:
        cases += SUITE_PARAMS["exponent_extended"]
    for n, p in progress(cases, desc="conjact"):
        classes = conj_classes(n, p)
        tables = ActionTables(classes)
        checks.append(spot_check_classes(classes))
        checks.extend(tables.check_tables())
        expected = None if n >= 7 else p
        checks.append(exponent_record(n, p, classes, expected))
        if n <= 5:
            checks.append(verify_aide(tables, exhaustive=True))
            checks.append(verify_lemma_b2(tables))
        elif (n, p) == (6, 2):
            checks.append(verify_aide(tables, exhaustive=False))
        if n <= 4:
            checks.append(verify_tau_equivariance(tables))
            checks.append(verify_equivariance_to_B(tables))
        if n <= 6:
            checks.append(verify_well_defined(tables))
            checks.extend(span_checks(tables, require_equal=(n, p) in SUITE_PARAMS["n45_cases"]))
        if n == 5:
            checks.append(verify_proof_cases(tables))
        if (n, p) == (4, 2):
            oracle = orbit_class_count(n, p)
            checks.append(check_record("class_count_matches_orbit_oracle", oracle == classes.count,
                                       {"classes": classes.count, "oracle": oracle}))
    logger.info(f"набор conjact: {sum(c['passed'] for c in checks)}/{len(checks)}")
    return suite_result("conjact", checks)
