"""
Модуль набора проверок brauer
Отвечает за формулу при n = 3, пример n = 4, отсутствие корней степени p
и сэндвич по перебору подгрупп
"""

import logging
from typing import Dict, List

from modules.brauer.formula import evaluate_formula
from modules.brauer.problem import build_problem, dual_B, dual_B0
from modules.brauer.scan import sandwich_scan
from utils.helpers import check_record, progress, suite_result

logger = logging.getLogger(__name__)

E_N4_GENERATORS = [((1, 1, 0, 1), 1), ((1, 0, 1, 1), 1)]


def example_n4() -> List[Dict]:
    """G = ⟨(1,1,0,1), (1,0,1,1)⟩ при n = 4, p = 2: Ш¹_cyc = формула = Z/2, Ш¹_cyc(G, B̂_0) = 0"""
    problem = build_problem(4, 2, E_N4_GENERATORS)
    report = evaluate_formula(problem)
    detail = report.row()
    return [
        check_record("e_n4: |G| = 4", problem.order == 4, {"order": problem.order}),
        check_record("e_n4: dim Ш¹_cyc = dim формулы = 1",
                     report.sha_dim == 1 and report.formula_dim == 1, detail),
        check_record("e_n4: Ш¹_cyc(G, B̂_0) = 0", report.sha_b0_dim == 0, detail),
        check_record("e_n4: формула ⊆ ядро в H¹(G, B̂_0)", bool(report.b0_contains_formula), detail),
    ]


def dual_rank_records() -> List[Dict]:
    """Ранги B̂ и B̂_0; при n = 3 модули совпадают"""
    checks = []
    for n, expected in ((3, 3), (4, 5), (5, 7)):
        problem = build_problem(n, 2, [])
        full, sub = dual_B(problem), dual_B0(problem)
        checks.append(check_record(f"rank B̂ (n={n}) = {expected}", full.rank == expected,
                                   {"rank": full.rank, "b0_rank": sub.rank}))
    trivial = build_problem(3, 2, [])
    checks.append(check_record("n=3: B_0 = B", dual_B(trivial).positions == dual_B0(trivial).positions))
    checks.append(check_record("пустой набор порождающих: G тривиальна", trivial.order == 1))
    return checks


def scan_records(n: int, p: int, policy: str = "auto", samples: int = None) -> List[Dict]:
    """Сводные проверки по таблице sandwich_scan"""
    frame = sandwich_scan(n, p, policy=policy, samples=samples)
    label = f"n={n}, p={p}"
    if frame.empty:
        return [check_record(f"sandwich {label}: есть группы", False)]

    def witness(mask):
        rows = frame[mask]
        return None if rows.empty else rows.iloc[0].to_dict()

    checks = [
        check_record(f"sandwich {label}: Ш ⊆ формула ⊆ H¹ ({len(frame)} групп)",
                     bool(frame["sandwich"].all()), witness(~frame["sandwich"])),
        check_record(f"sandwich {label}: Ш¹_cyc(G, B̂_0) = 0", bool((frame["sha_b0"] == 0).all()),
                     witness(frame["sha_b0"] != 0)),
        check_record(f"sandwich {label}: условия из нормы не меняют ядро",
                     not frame["power_conditions_change"].any(), witness(frame["power_conditions_change"])),
    ]
    if 3 <= n <= 6:
        contained = frame["b0_contains_formula"].astype(bool)
        checks.append(check_record(f"sandwich {label}: формула ⊆ ядро в H¹(G, B̂_0)",
                                   bool(contained.all()), witness(~contained)))
    if n == 3:
        checks.append(check_record(f"sandwich {label}: формула = 0 для всех G",
                                   bool((frame["formula"] == 0).all()), witness(frame["formula"] != 0)))
    if n in (4, 5) and p == 2:
        checks.append(check_record(f"sandwich {label}: формула = Ш¹_cyc",
                                   not frame["flagged"].any(), witness(frame["flagged"])))
    if p % 2 == 1:
        surjective = frame[frame["chi_surjective"]]
        checks.append(check_record(f"sandwich {label}: χ сюръективен ⇒ H¹(G, B̂) = 0",
                                   bool((surjective["h1"] == 0).all()),
                                   None if surjective.empty else witness(frame["chi_surjective"] & (frame["h1"] != 0))))
    if n == 6:
        logger.warning(f"sandwich {label}: строк с формулой больше Ш - {int(frame['flagged'].sum())}")
    return checks


def run_suite(extended: bool = False) -> Dict:
    """
    Набор brauer

    Параметры:
    - extended: добавить n = 5 для p = 3 и поиск при n = 6, p = 2

    Возвращает:
    - результат набора
    """
    checks = dual_rank_records()
    checks.extend(example_n4())
    cases = [(3, 2, "exhaustive", None), (3, 3, "exhaustive", None), (4, 2, "exhaustive", None),
             (4, 3, "sample", 16), (5, 2, "sample", 16)]
    if extended:
        cases += [(5, 3, "sample", 16), (6, 2, "sample", 32)]
    for n, p, policy, samples in progress(cases, desc="brauer"):
        checks.extend(scan_records(n, p, policy, samples))
    logger.info(f"набор brauer: {sum(c['passed'] for c in checks)}/{len(checks)}")
    return suite_result("brauer", checks)
