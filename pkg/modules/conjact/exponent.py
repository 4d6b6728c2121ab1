"""
Модуль внешнего показателя
Отвечает за порядки элементов U¹, отображения степеней на классах
и наименьший делитель e | d, через который пропускается действие (Z/d)*
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional

import numpy as np
from sympy.ntheory import primitive_root

from modules.conjact.classes import ConjClasses, conj_classes
from modules.modarith.residue import require_prime
from modules.unigroup.unitri import batch_power
from utils.errors import UnsupportedError

logger = logging.getLogger(__name__)


def element_orders(mats: np.ndarray, p: int) -> np.ndarray:
    """Порядки унипотентных матриц над F_p (степени p)"""
    mats = np.asarray(mats, dtype=np.int64)
    eye = np.eye(mats.shape[-1], dtype=np.int64)
    orders = np.ones(len(mats), dtype=np.int64)
    current = mats.copy()
    active = (current != eye).any(axis=(1, 2))
    while active.any():
        current[active] = batch_power(current[active], p, p)
        orders[active] *= p
        active = (current != eye).any(axis=(1, 2))
    return orders


def group_exponent(classes: ConjClasses) -> int:
    """Показатель U¹: порядок сохраняется при сопряжении, достаточно представителей"""
    return int(element_orders(classes.rep_matrices(), classes.p).max())


def power_class_map(classes: ConjClasses, i: int) -> np.ndarray:
    """Номер класса [x^i] для каждого класса [x]"""
    powers = batch_power(classes.rep_matrices(), int(i), classes.p)
    return classes.classes_of_matrices(powers)


@lru_cache(maxsize=None)
def unit_kernel_generators(p: int, j: int, t: int) -> tuple:
    """
    Порождающие ядра (Z/p^t)* -> (Z/p^j)*

    Параметры:
    - p: простое
    - j: показатель делителя (0 - вся группа)
    - t: показатель модуля d = p^t
    """
    d = p ** t
    if j >= t:
        return ()
    if p == 2 and j <= 1:
        if t == 1:
            return ()
        if t == 2:
            return (3,)
        return (d - 1, 5)
    if j == 0:
        return (int(primitive_root(d)),)
    return (1 + p ** j,)


@dataclass
class OuterExponent:
    n: int
    p: int
    exponent: int
    outer_exponent: int
    class_count: int
    trivial_action: bool
    unproven_range: bool
    tested: List[Dict] = field(default_factory=list)


def outer_exponent(n: int, p: int, classes: Optional[ConjClasses] = None,
                   max_elems: Optional[int] = None, workers: Optional[int] = None) -> OuterExponent:
    """
    Внешний показатель U¹

    Ищется наименьшее e = p^j, j >= 1, такое что ядро (Z/d)* -> (Z/e)*
    лежит в I = {i : [x^i] = [x] для всех x}; I - подгруппа,
    поэтому проверяются только порождающие ядра.

    Возвращает:
    - OuterExponent
    """
    require_prime(p)
    if classes is None:
        classes = conj_classes(n, p, max_elems=max_elems, workers=workers)
    d = group_exponent(classes)
    t = 0
    while p ** t < d:
        t += 1
    if p ** t != d:
        raise UnsupportedError(f"показатель U¹ {d} не является степенью {p}")
    identity_map = np.arange(classes.count)
    tested = {}

    def acts_trivially(i: int) -> bool:
        if i not in tested:
            tested[i] = bool(np.array_equal(power_class_map(classes, i), identity_map))
        return tested[i]

    e = d
    for j in range(1, t + 1):
        if all(acts_trivially(g) for g in unit_kernel_generators(p, j, t)):
            e = p ** j
            break
    trivial = all(acts_trivially(g) for g in unit_kernel_generators(p, 0, t))
    logger.info(f"внешний показатель n={n}, p={p}: d={d}, e={e}, классов {classes.count}")
    return OuterExponent(
        n=n, p=p, exponent=d, outer_exponent=e, class_count=classes.count,
        trivial_action=trivial, unproven_range=n >= 7,
        tested=[{"i": i, "fixes_all_classes": v} for i, v in sorted(tested.items())],
    )
