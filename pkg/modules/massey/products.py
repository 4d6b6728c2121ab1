"""
Модуль множеств произведений Масси
Отвечает за перечисление всех определяющих систем через подъёмы
α: Γ → U/U¹ до Γ → U/Z и за предикаты "определено" и "обращается в нуль"
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from modules.cohom.cup import coboundary2_test, coboundary_space, class_key
from modules.cohom.lifting import PatternStep, enumerate_lifts, lift_abelian_kernel, pattern_chain
from modules.massey.dwyer import hom_to_defining_system, massey_value
from modules.massey.problem import MasseyProblem
from modules.unigroup.pattern import centre_pattern, pattern_elements, u1_pattern
from utils.errors import ConsistencyError
from utils.helpers import budget, ensure_budget

logger = logging.getLogger(__name__)


@dataclass
class LiftOutcome:
    """Подъём Γ → U/Z: образы порождающих, класс значения и поднимается ли он в U"""

    images: Dict[int, np.ndarray] = field(repr=False)
    class_key: tuple = field(repr=False)
    value_trivial: bool
    lifts_to_U: bool


@dataclass
class MasseyProductSet:
    """
    Множество ⟨α_0, ..., α_{n-1}⟩ ⊂ H²(Γ, M_{0,n})

    classes - канонические коды классов (отсортированы);
    raw_count - число определяющих систем; bucket_count - число
    классов сопряжённости соответствующих гомоморфизмов под U¹/Z.
    """

    classes: List[tuple] = field(repr=False)
    contains_zero: bool
    outcomes: List[LiftOutcome] = field(repr=False, default_factory=list)
    raw_count: int = 0
    bucket_count: int = 0

    @property
    def defined(self) -> bool:
        return self.raw_count > 0

    def summary(self) -> Dict[str, Any]:
        return {
            "defined": self.defined,
            "contains_zero": self.contains_zero,
            "classes": len(self.classes),
            "defining_systems": self.raw_count,
            "conjugacy_buckets": self.bucket_count,
            "every_lift_lifts": all(o.lifts_to_U for o in self.outcomes),
        }


class _ClassIndex:
    """Канонические коды классов 2-коциклов в M_{0,n}"""

    def __init__(self, problem: MasseyProblem):
        self.module = problem.module(0, problem.n)
        p, k = self.module.prime_power
        self.reducer = coboundary_space(self.module) if k == 1 else None
        self.reps: List[np.ndarray] = []

    def key(self, cocycle: np.ndarray, trivial: bool) -> tuple:
        if self.reducer is not None:
            return class_key(self.reducer, cocycle)
        if trivial:
            return (0,) * cocycle.size
        m = self.module.modulus
        for rep in self.reps:
            if coboundary2_test(self.module, np.mod(cocycle - rep, m), validate=False) is not None:
                return tuple(int(v) for v in rep.reshape(-1))
        self.reps.append(cocycle)
        return tuple(int(v) for v in cocycle.reshape(-1))


def lifts_to_centre_quotient(problem: MasseyProblem, max_nodes: Optional[int] = None) -> List[List[np.ndarray]]:
    """Все гомоморфизмы Γ → U/Z (T(W)/Z(W)), поднимающие α"""
    n = problem.n
    steps = pattern_chain(n, problem.modulus, u1_pattern(n), stop=centre_pattern(n))
    return enumerate_lifts(problem.gamma, steps, problem.alpha_images(), max_nodes=max_nodes)


def _bucket_count(problem: MasseyProblem, lifts: Sequence[Sequence[np.ndarray]]) -> int:
    n = problem.n
    quotient = problem.quotient(centre_pattern(n))
    positions = u1_pattern(n) - centre_pattern(n)
    ensure_budget("max_elems", problem.modulus ** len(positions))
    conjugators = [quotient.normalize(u) for u in pattern_elements(n, problem.modulus, positions)]
    gens = problem.gamma.generators

    def key(images) -> tuple:
        return tuple(quotient.key(images[s]) for s in gens)

    seen = set()
    buckets = 0
    for images in lifts:
        if key(images) in seen:
            continue
        buckets += 1
        for u in conjugators:
            seen.add(tuple(quotient.key(quotient.conj(u, images[s])) for s in gens))
    return buckets


def massey_product_set(problem: MasseyProblem, max_nodes: Optional[int] = None,
                       bucket: bool = True) -> MasseyProductSet:
    """
    Полное множество значений произведения Масси

    Перебираются все подъёмы α до Γ → U/Z (режим "all" по слоям U¹/Z);
    каждый даёт определяющую систему и её значение. Для каждого
    подъёма отдельно проверяется подъём в U через центр.

    Параметры:
    - problem: задача MasseyProblem
    - max_nodes: переопределение бюджета узлов
    - bucket: считать классы сопряжённости под U¹/Z

    Возвращает:
    - MasseyProductSet
    """
    lifts = lifts_to_centre_quotient(problem, max_nodes)
    index = _ClassIndex(problem)
    centre_step = PatternStep(problem.n, problem.modulus, centre_pattern(problem.n), frozenset())
    outcomes = []
    for images in lifts:
        system = hom_to_defining_system(problem, images)
        value = massey_value(system)
        if not value.agrees:
            raise ConsistencyError("значение по формуле и препятствие подъёма различаются",
                                   witness=system.as_lists())
        lifted = lift_abelian_kernel(problem.gamma, centre_step, images, mode="one").lifted
        if lifted != value.trivial:
            raise ConsistencyError("подъём в U не согласован с тривиальностью значения",
                                   witness=system.as_lists())
        outcomes.append(LiftOutcome(images={s: images[s] for s in problem.gamma.generators},
                                    class_key=index.key(value.cocycle, value.trivial),
                                    value_trivial=value.trivial, lifts_to_U=lifted))
    classes = sorted(set(o.class_key for o in outcomes))
    buckets = _bucket_count(problem, lifts) if bucket and lifts else len(lifts)
    logger.debug(f"{problem.name}: {len(lifts)} определяющих систем, {len(classes)} классов, {buckets} корзин")
    return MasseyProductSet(classes=classes, contains_zero=any(o.value_trivial for o in outcomes),
                            outcomes=outcomes, raw_count=len(lifts), bucket_count=buckets)


def _exists(problem: MasseyProblem, stop, max_nodes: Optional[int]) -> bool:
    """Поиск в глубину подъёма α до Γ → T/stop с перебором по классам H¹ на слоях"""
    n = problem.n
    steps = pattern_chain(n, problem.modulus, u1_pattern(n), stop=stop)
    limit = budget("max_nodes", max_nodes)
    counter = {"nodes": 0}

    def dfs(depth: int, images: List[np.ndarray]) -> bool:
        if depth == len(steps):
            return True
        result = lift_abelian_kernel(problem.gamma, steps[depth], images, mode="classes")
        for lift in result.lifts:
            counter["nodes"] += 1
            ensure_budget("max_nodes", counter["nodes"], limit)
            if dfs(depth + 1, lift):
                return True
        return False

    found = dfs(0, problem.alpha_images())
    logger.debug(f"{problem.name}: поиск до {sorted(stop)} - {counter['nodes']} узлов, найдено={found}")
    return found


def is_defined(problem: MasseyProblem, max_nodes: Optional[int] = None) -> bool:
    """Существует определяющая система (α поднимается до Γ → U/Z)"""
    return _exists(problem, centre_pattern(problem.n), max_nodes)


def vanishes(problem: MasseyProblem, max_nodes: Optional[int] = None) -> bool:
    """0 ∈ ⟨α⟩ (α поднимается до Γ → U)"""
    result = _exists(problem, frozenset(), max_nodes)
    if result and not is_defined(problem, max_nodes):
        raise ConsistencyError("произведение обращается в нуль, но не определено")
    return result
