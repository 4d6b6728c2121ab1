"""
Модуль перебора подгрупп для формулы Брауэра
Отвечает за перечисление подпространств F_p^n, выборку подгрупп
G ⊆ A × (Z/p)* и сводную таблицу сэндвича
"""

import itertools
import logging
from typing import Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd
from sympy.ntheory import primitive_root

from config.settings import SCAN_CONFIG
from modules.brauer.formula import evaluate_formula
from modules.brauer.problem import build_problem
from utils.errors import InputError
from utils.helpers import ensure_budget, progress

logger = logging.getLogger(__name__)

SCAN_POLICIES = ("auto", "exhaustive", "sample")

Generators = List[Tuple[Tuple[int, ...], int]]


def subspaces(n: int, p: int) -> Iterator[np.ndarray]:
    """
    Все подпространства F_p^n как базисы в приведённом ступенчатом виде

    Для каждого набора ведущих столбцов перебираются свободные элементы
    справа от ведущих, вне ведущих столбцов.
    """
    for k in range(n + 1):
        for pivots in itertools.combinations(range(n), k):
            free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
            for values in itertools.product(range(p), repeat=len(free)):
                basis = np.zeros((k, n), dtype=np.int64)
                for r, pc in enumerate(pivots):
                    basis[r, pc] = 1
                for (r, c), v in zip(free, values):
                    basis[r, c] = v
                yield basis


def subspace_count(n: int, p: int) -> int:
    """Число подпространств F_p^n (сумма гауссовых биномиальных коэффициентов)"""
    total = 0
    for k in range(n + 1):
        num, den = 1, 1
        for i in range(k):
            num *= p ** (n - i) - 1
            den *= p ** (i + 1) - 1
        total += num // den
    return total


def exhaustive_subgroups(n: int, p: int) -> Iterator[Generators]:
    """Все подгруппы A × {1}; при нечётном p также H × (Z/p)*"""
    ensure_budget("brute_force_candidates", subspace_count(n, p) * (2 if p > 2 else 1))
    root = int(primitive_root(p)) if p > 2 else 1
    for basis in subspaces(n, p):
        gens = [(tuple(int(v) for v in row), 1) for row in basis]
        yield gens
        if p > 2:
            yield gens + [(tuple([0] * n), root)]


def sampled_subgroups(n: int, p: int, samples: int, seed: int) -> Iterator[Generators]:
    """Случайные наборы из 1-3 порождающих; при нечётном p со случайными χ"""
    rng = np.random.default_rng(seed)
    seen = set()
    attempts = 0
    while len(seen) < samples and attempts < 20 * samples:
        attempts += 1
        count = int(rng.integers(1, 4))
        vectors = rng.integers(0, p, size=(count, n))
        chis = rng.integers(1, p, size=count) if p > 2 else np.ones(count, dtype=np.int64)
        gens = [(tuple(int(v) for v in row), int(c)) for row, c in zip(vectors, chis)]
        key = tuple(sorted(gens))
        if key in seen:
            continue
        seen.add(key)
        yield gens


def _policy(n: int, p: int, policy: str) -> str:
    if policy not in SCAN_POLICIES:
        raise InputError(f"неизвестная политика перебора {policy!r}")
    if policy != "auto":
        return policy
    return "exhaustive" if n == 3 or (p == 2 and n <= 4) else "sample"


def sandwich_scan(n: int, p: int, policy: str = "auto", samples: Optional[int] = None,
                  seed: Optional[int] = None, workers: Optional[int] = None) -> pd.DataFrame:
    """
    Таблица отчётов формулы по подгруппам G

    Параметры:
    - n, p: размер и простое
    - policy: "exhaustive" (все подгруппы), "sample" (случайные), "auto"
    - samples, seed: параметры выборки (по умолчанию из SCAN_CONFIG)
    - workers: число потоков для сбора условий

    Возвращает:
    - DataFrame, по строке на группу; flagged - формула строго больше Ш¹_cyc
    """
    mode = _policy(n, p, policy)
    samples = SCAN_CONFIG["samples"] if samples is None else samples
    seed = SCAN_CONFIG["seed"] if seed is None else seed
    source = exhaustive_subgroups(n, p) if mode == "exhaustive" else sampled_subgroups(n, p, samples, seed)
    rows = []
    seen_groups = set()
    for gens in progress(source, desc=f"sandwich n={n} p={p}"):
        problem = build_problem(n, p, gens)
        key = tuple(problem.elements)
        if key in seen_groups:
            continue
        seen_groups.add(key)
        report = evaluate_formula(problem, workers=workers)
        row = report.row()
        row["generators"] = " ".join(f"{''.join(map(str, a))}:{c}" for a, c in gens) or "-"
        row["chi_surjective"] = problem.chi_surjective()
        row["nopthroot"] = report.nopthroot
        rows.append(row)
    frame = pd.DataFrame(rows)
    if not frame.empty:
        frame["flagged"] = ~frame["formula_equals_sha"]
        logger.info(f"sandwich n={n}, p={p}: {len(frame)} групп, отмечено {int(frame['flagged'].sum())}")
    return frame
