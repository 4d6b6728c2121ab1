"""
Модуль соответствия Дуайера
Отвечает за биекцию определяющих систем и гомоморфизмов Γ → U/Z
(T(W)/Z(W)) и за значение произведения Масси как класса препятствия
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from modules.cohom.cup import coboundary2, coboundary2_test, cup11, is_cocycle2
from modules.massey.problem import MasseyProblem, Pair
from modules.modarith.dense import matmul_mod
from modules.unigroup.pattern import centre_pattern, tri_inverse
from utils.errors import ConsistencyError, InputError
from utils.helpers import ensure_budget

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class DefiningSystem:
    """Определяющая система {a_{i,j}}: 1-коцепи Γ → M_{i,j}, (i, j) ≠ (0, n)"""

    problem: MasseyProblem = field(repr=False)
    cochains: Dict[Pair, np.ndarray] = field(repr=False)

    def __getitem__(self, pair: Pair) -> np.ndarray:
        return self.cochains[pair]

    def cup_sum(self, i: int, j: int) -> np.ndarray:
        """Σ_{m=i+1}^{j-1} a_{i,m} ∪ a_{m,j} в M_{i,j}"""
        problem = self.problem
        order = problem.gamma.order
        total = np.zeros((order, order, 1), dtype=np.int64)
        for m in range(i + 1, j):
            total = total + cup11(self.cochains[(i, m)], problem.module(i, m),
                                  self.cochains[(m, j)], problem.module(m, j))
        return np.mod(total, problem.modulus)

    def as_lists(self) -> Dict[str, List[int]]:
        return {f"{i},{j}": a.tolist() for (i, j), a in sorted(self.cochains.items())}


@dataclass
class MasseyValue:
    """
    Значение ⟨α⟩_Λ = [b_{0,n}]

    trivializer - 1-коцепь f с ∂f = b (если класс тривиален);
    agrees - b и -α_Λ*u отличаются на кограницу.
    """

    cocycle: np.ndarray = field(repr=False)
    trivial: bool
    agrees: bool
    trivializer: Optional[np.ndarray] = field(repr=False, default=None)


def condition_failure(system: DefiningSystem) -> Optional[Dict[str, Any]]:
    """
    Первое нарушение ∂a_{i,j} = -Σ a_{i,m} ∪ a_{m,j} или a_{i,i+1} = α_i

    Возвращает:
    - None либо свидетель {i, j, sigma, tau}
    """
    problem = system.problem
    for i, alpha in enumerate(problem.alphas):
        diff = np.flatnonzero(np.mod(system[(i, i + 1)] - alpha, problem.modulus))
        if diff.size:
            return {"i": i, "j": i + 1, "sigma": int(diff[0]), "tau": None}
    for i, j in problem.pairs():
        if j - i < 2:
            continue
        lhs = coboundary2(problem.module(i, j), system[(i, j)].reshape(-1, 1))
        rhs = np.mod(-system.cup_sum(i, j), problem.modulus)
        bad = np.argwhere((lhs != rhs).any(axis=2))
        if bad.size:
            return {"i": i, "j": j, "sigma": int(bad[0][0]), "tau": int(bad[0][1])}
    return None


def _matrix(problem: MasseyProblem, system: DefiningSystem, g: int) -> np.ndarray:
    n = problem.n
    m = problem.modulus
    mat = np.diag(np.array([int(problem.character(i)[g]) for i in range(n + 1)], dtype=np.int64))
    for i, j in problem.pairs():
        mat[i, j] = (int(system[(i, j)][g]) * int(problem.character(j)[g])) % m
    return mat


def _check_hom(problem: MasseyProblem, images: Sequence[np.ndarray]) -> Optional[Dict[str, int]]:
    quotient = problem.quotient(centre_pattern(problem.n))
    gamma = problem.gamma
    for s in gamma.generators:
        for g in range(gamma.order):
            if not np.array_equal(quotient.mul(images[s], images[g]), images[gamma.mul(s, g)]):
                return {"sigma": s, "tau": g}
    return None


def defining_system_to_hom(system: DefiningSystem) -> List[np.ndarray]:
    """
    Гомоморфизм Γ → U/Z (T(W)/Z(W)) по определяющей системе

    Матрица σ: M_{i,i} = χ_i(σ), M_{i,j} = a_{i,j}(σ)·χ_j(σ), M_{0,n} = 0.

    Возвращает:
    - матрицы всех элементов Γ в нормальной форме по модулю Z
    """
    witness = condition_failure(system)
    if witness is not None:
        raise InputError(f"определяющая система нарушает условие (i, j, σ, τ) = "
                         f"({witness['i']}, {witness['j']}, {witness['sigma']}, {witness['tau']})")
    problem = system.problem
    images = [_matrix(problem, system, g) for g in range(problem.gamma.order)]
    bad = _check_hom(problem, images)
    if bad is not None:
        raise ConsistencyError("определяющая система не дала гомоморфизм", witness=bad)
    return images


def hom_to_defining_system(problem: MasseyProblem, images: Sequence[np.ndarray]) -> DefiningSystem:
    """
    Определяющая система по гомоморфизму Γ → U/Z, поднимающему α

    a_{i,j}(σ) = M_{i,j}(σ)·χ_j(σ^{-1}); в классическом случае - элементы матрицы.
    """
    gamma = problem.gamma
    if len(images) != gamma.order:
        raise InputError("гомоморфизм должен быть задан на всех элементах Γ")
    quotient = problem.quotient(centre_pattern(problem.n))
    images = [quotient.normalize(x) for x in images]
    for g, x in enumerate(images):
        if not problem.is_element(x):
            raise InputError(f"образ элемента {g} не лежит в группе коэффициентов")
    bad = _check_hom(problem, images)
    if bad is not None:
        raise InputError(f"отображение не гомоморфизм на паре {bad}")
    m = problem.modulus
    stack = np.array(images, dtype=np.int64)
    cochains: Dict[Pair, np.ndarray] = {}
    for i, j in problem.pairs():
        cochains[(i, j)] = np.mod(stack[:, i, j] * problem.character_inverse(j), m)
    for i in range(problem.n + 1):
        if not np.array_equal(np.mod(stack[:, i, i], m), problem.character(i)):
            raise InputError(f"диагональ {i} гомоморфизма не совпадает с χ_{i}")
    system = DefiningSystem(problem=problem, cochains=cochains)
    for i, alpha in enumerate(problem.alphas):
        if not np.array_equal(cochains[(i, i + 1)], alpha):
            raise InputError(f"гомоморфизм не поднимает α_{i}")
    return system


def obstruction_cocycle(problem: MasseyProblem, images: Sequence[np.ndarray]) -> np.ndarray:
    """z(σ, τ): α̃(σ)α̃(τ)α̃(στ)^{-1} = I + z·E_{0,n} для подъёма с нулём в (0, n)"""
    gamma = problem.gamma
    m = problem.modulus
    n = problem.n
    inverses = [tri_inverse(x, m) for x in images]
    z = np.zeros((gamma.order, gamma.order, 1), dtype=np.int64)
    for g in range(gamma.order):
        for h in range(gamma.order):
            c = matmul_mod(matmul_mod(images[g], images[h], m), inverses[gamma.mul(g, h)], m)
            centre = np.eye(n + 1, dtype=np.int64)
            centre[0, n] = c[0, n]
            if not np.array_equal(c, centre):
                raise ConsistencyError("α̃(σ)α̃(τ)α̃(στ)^{-1} не лежит в Z", witness={"sigma": g, "tau": h})
            z[g, h, 0] = c[0, n]
    return z


def massey_value(system: DefiningSystem) -> MasseyValue:
    """
    Значение произведения Масси для определяющей системы

    b_{0,n} = -Σ_{m=1}^{n-1} a_{0,m} ∪ a_{m,n}; независимо строится
    препятствие z подъёма в U и проверяется, что b + z - кограница.
    """
    problem = system.problem
    n = problem.n
    module = problem.module(0, n)
    b = np.mod(-system.cup_sum(0, n), problem.modulus)
    if not is_cocycle2(module, b):
        raise ConsistencyError("b_{0,n} не является 2-коциклом")
    z = obstruction_cocycle(problem, defining_system_to_hom(system))
    agrees = coboundary2_test(module, np.mod(b + z, problem.modulus), validate=False) is not None
    trivializer = coboundary2_test(module, b, validate=False)
    return MasseyValue(cocycle=b, trivial=trivializer is not None, agrees=agrees, trivializer=trivializer)


def count_defining_systems_brute(problem: MasseyProblem) -> int:
    """
    Число определяющих систем полным перебором коцепей по парам (i, j)

    Пары обрабатываются по возрастанию длины; для каждой пары отбираются
    все коцепи, удовлетворяющие условию при уже выбранных коротких парах.
    """
    gamma = problem.gamma
    m = problem.modulus
    order = gamma.order
    ensure_budget("brute_force_candidates", m ** order)
    candidates = np.indices((m,) * order).reshape(order, -1).T
    pairs = [pair for pair in problem.pairs() if pair[1] - pair[0] >= 2]
    base = {(i, i + 1): alpha for i, alpha in enumerate(problem.alphas)}

    def solutions(pair: Pair, chosen: Dict[Pair, np.ndarray]) -> List[np.ndarray]:
        i, j = pair
        module = problem.module(i, j)
        rhs = np.zeros((order, order, 1), dtype=np.int64)
        for mid in range(i + 1, j):
            rhs = rhs + cup11(chosen[(i, mid)], problem.module(i, mid), chosen[(mid, j)], problem.module(mid, j))
        rhs = np.mod(-rhs[:, :, 0], m)
        w = module.action[:, 0, 0]
        lhs = w[None, :, None] * candidates[:, None, :] - candidates[:, gamma.table] + candidates[:, :, None]
        ok = (np.mod(lhs, m) == rhs[None]).all(axis=(1, 2))
        return list(candidates[ok])

    def count(index: int, chosen: Dict[Pair, np.ndarray]) -> int:
        if index == len(pairs):
            return 1
        total = 0
        for a in solutions(pairs[index], chosen):
            chosen[pairs[index]] = a
            total += count(index + 1, chosen)
            ensure_budget("max_nodes", total)
        chosen.pop(pairs[index], None)
        return total

    return count(0, dict(base))


def round_trip(problem: MasseyProblem, images: Sequence[np.ndarray]) -> bool:
    """hom → Λ → hom возвращает тот же гомоморфизм"""
    quotient = problem.quotient(centre_pattern(problem.n))
    back = defining_system_to_hom(hom_to_defining_system(problem, images))
    return all(np.array_equal(quotient.normalize(x), y) for x, y in zip(images, back))
