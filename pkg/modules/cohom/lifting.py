"""
Модуль подъёмов гомоморфизмов
Отвечает за подъём через расширение с абелевым ядром (класс препятствия
в H²(Γ, K)), перечисление подъёмов и решение задач вложения Γ → U/K → U
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from modules.cohom.cup import coboundary2_test, is_cocycle2
from modules.cohom.gmodule import GModule
from modules.cohom.groups import FiniteGroup, extend_hom, is_table_hom
from modules.cohom.h1 import cocycle_matrix, h1
from modules.modarith.dense import kernel_array, span_elements
from modules.modarith.residue import prime_power
from modules.modarith.smith import kernel_generators
from modules.unigroup.pattern import MatrixQuotient, layers, make_pattern, ordered, pattern_elements
from utils.constants import EMBEDDING_STATUS, LIFT_STATUS
from utils.errors import ConsistencyError, InputError, UnsupportedError
from utils.helpers import budget, ensure_budget

logger = logging.getLogger(__name__)

LIFT_MODES = ("one", "classes", "all")


class TableStep:
    """
    Сюръекция E → Q табличных групп с абелевым ядром K ≅ (Z/q)^r

    Базис K выбирается жадно среди элементов порядка q.
    """

    def __init__(self, source: FiniteGroup, target: FiniteGroup, projection: Sequence[int]):
        self.source = source
        self.target = target
        self.projection = np.asarray(projection, dtype=np.int64)
        if self.projection.shape != (source.order,) or not is_table_hom(source, target, self.projection):
            raise InputError("проекция E → Q не является гомоморфизмом")
        if np.unique(self.projection).size != target.order:
            raise InputError("проекция E → Q не сюръективна")
        kernel = [int(x) for x in np.flatnonzero(self.projection == target.identity)]
        for x in kernel:
            for y in kernel:
                if not source.commute(x, y):
                    raise InputError("ядро расширения неабелево")
        orders = {x: source.element_order(x) for x in kernel}
        q = max(orders.values())
        if prime_power(q) is None and q > 1:
            raise UnsupportedError(f"показатель ядра {q} не является степенью простого")
        self.modulus = max(q, 2)
        basis: List[int] = []
        span = {source.identity}
        for x in sorted(kernel, key=lambda v: (-orders[v], v)):
            if len(span) == len(kernel):
                break
            if orders[x] == q and not (set(source.closure([x])) & span) - {source.identity}:
                basis.append(x)
                span = set(source.closure(basis))
        if len(span) != len(kernel):
            raise UnsupportedError("ядро расширения не гомоциклическое")
        self.basis = basis
        self.rank = len(basis)
        self._encode: Dict[int, np.ndarray] = {}
        for coeffs in itertools.product(range(q), repeat=self.rank):
            x = source.identity
            for c, b in zip(coeffs, basis):
                x = source.mul(x, source.power(b, c))
            self._encode[x] = np.array(coeffs, dtype=np.int64)
        self._decode = {tuple(v.tolist()): x for x, v in self._encode.items()}
        self._section = np.full(target.order, -1, dtype=np.int64)
        for x in range(source.order - 1, -1, -1):
            self._section[self.projection[x]] = x
        self._section[target.identity] = source.identity
        self.identity = source.identity

    def section(self, q: int) -> int:
        return int(self._section[q])

    def mul(self, x: int, y: int) -> int:
        return self.source.mul(x, y)

    def inv(self, x: int) -> int:
        return self.source.inv(x)

    def equal(self, x: int, y: int) -> bool:
        return x == y

    def project(self, x: int) -> int:
        return int(self.projection[x])

    def encode(self, x: int) -> np.ndarray:
        if x not in self._encode:
            raise ConsistencyError("элемент не лежит в ядре", witness={"element": x})
        return self._encode[x]

    def decode(self, v: np.ndarray) -> int:
        return self._decode[tuple(int(c) % self.modulus for c in v)]

    def conj_matrix(self, x: int) -> np.ndarray:
        inv = self.inv(x)
        cols = [self.encode(self.mul(self.mul(x, b), inv)) for b in self.basis]
        return np.array(cols, dtype=np.int64).reshape(self.rank, self.rank).T


class PatternStep:
    """
    Шаг T/lo → T/hi для шаблонов hi ⊃ lo; слой hi \\ lo абелев

    Элементы - матрицы в нормальной форме по модулю lo; координаты ядра -
    элементы в позициях слоя.
    """

    def __init__(self, n: int, m: int, hi, lo):
        self.n = n
        self.modulus = m
        self.hi = make_pattern(n, hi)
        self.lo = make_pattern(n, lo)
        if not self.lo <= self.hi:
            raise InputError("нижний шаблон должен содержаться в верхнем")
        self.layer = ordered(self.hi - self.lo)
        self.rank = len(self.layer)
        self.upper = MatrixQuotient(n, m, self.hi)
        self.lower = MatrixQuotient(n, m, self.lo)
        self.identity = self.lower.identity()

    def section(self, x: np.ndarray) -> np.ndarray:
        return self.lower.normalize(self.upper.normalize(x))

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.lower.mul(x, y)

    def inv(self, x: np.ndarray) -> np.ndarray:
        return self.lower.inv(x)

    def equal(self, x: np.ndarray, y: np.ndarray) -> bool:
        return bool(np.array_equal(x, y))

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.upper.normalize(x)

    def encode(self, x: np.ndarray) -> np.ndarray:
        x = self.lower.normalize(x)
        v = np.array([x[i, j] for i, j in self.layer], dtype=np.int64)
        if not np.array_equal(self.decode(v), x):
            raise ConsistencyError("элемент не лежит в слое hi/lo", witness={"matrix": x})
        return v

    def decode(self, v: np.ndarray) -> np.ndarray:
        x = self.lower.identity()
        for (i, j), c in zip(self.layer, v):
            x[i, j] = int(c) % self.modulus
        return x

    def conj_matrix(self, x: np.ndarray) -> np.ndarray:
        cols = []
        for t in range(self.rank):
            unit = np.zeros(self.rank, dtype=np.int64)
            unit[t] = 1
            cols.append(self.encode(self.lower.conj(x, self.decode(unit))))
        return np.array(cols, dtype=np.int64).reshape(self.rank, self.rank).T


@dataclass
class LiftResult:
    """
    Результат подъёма φ: Γ → Q до Γ → E

    lifts - образы всех элементов Γ для каждого найденного подъёма;
    obstruction - 2-коцикл препятствия при status = "obstructed".
    """

    status: str
    lifts: List[List[Any]] = field(repr=False, default_factory=list)
    obstruction: Optional[np.ndarray] = field(repr=False, default=None)
    module: Optional[GModule] = field(repr=False, default=None)

    @property
    def lifted(self) -> bool:
        return self.status == LIFT_STATUS["lifted"]


def _cocycle_space(module: GModule) -> List[np.ndarray]:
    """Все 1-коциклы Γ → K"""
    p, k = module.prime_power
    zmat = cocycle_matrix(module)
    shape = (module.group.order, module.rank)
    if k == 1:
        basis = kernel_array(zmat, p)
        ensure_budget("max_nodes", p ** basis.shape[0])
        return [v.reshape(shape) for v in span_elements(basis, p)]
    gens = kernel_generators(zmat, p, k)
    total = 1
    for _, order in gens:
        total *= order
    ensure_budget("max_nodes", total)
    q = module.modulus
    out = []
    for coeffs in itertools.product(*(range(order) for _, order in gens)):
        v = np.zeros(shape[0] * shape[1], dtype=np.int64)
        for c, (g, _) in zip(coeffs, gens):
            v = np.mod(v + c * g, q)
        out.append(v.reshape(shape))
    return out


def lift_abelian_kernel(gamma: FiniteGroup, step, phi: Sequence[Any], mode: str = "one") -> LiftResult:
    """
    Подъём гомоморфизма через расширение с абелевым ядром

    Параметры:
    - gamma: группа Γ
    - step: TableStep или PatternStep (E → Q с ядром K)
    - phi: образы всех элементов Γ в Q
    - mode: "one" - один подъём, "classes" - по одному на класс
      K-сопряжённости (f₀ + H¹), "all" - все подъёмы (f₀ + Z¹)

    Возвращает:
    - LiftResult со статусом "lifted" или "obstructed"
    """
    if mode not in LIFT_MODES:
        raise InputError(f"неизвестный режим подъёма {mode!r}")
    if len(phi) != gamma.order:
        raise InputError("φ должен быть задан на всех элементах Γ")
    sections = [step.section(x) for x in phi]
    if step.rank == 0:
        return LiftResult(status=LIFT_STATUS["lifted"], lifts=[sections])
    action = np.array([step.conj_matrix(s) for s in sections], dtype=np.int64)
    module = GModule(gamma, step.modulus, action, name="K")
    order = gamma.order
    inverses = [step.inv(s) for s in sections]
    obstruction = np.zeros((order, order, step.rank), dtype=np.int64)
    for g in range(order):
        for h in range(order):
            prod = step.mul(step.mul(sections[g], sections[h]), inverses[gamma.mul(g, h)])
            obstruction[g, h] = step.encode(prod)
    if not is_cocycle2(module, obstruction):
        raise ConsistencyError("препятствие не является 2-коциклом: φ не гомоморфизм")
    f0 = coboundary2_test(module, -obstruction, validate=False)
    if f0 is None:
        logger.debug(f"подъём через ядро ранга {step.rank} невозможен")
        return LiftResult(status=LIFT_STATUS["obstructed"], obstruction=obstruction, module=module)
    if mode == "one":
        shifts = [np.zeros_like(f0)]
    elif mode == "classes":
        basis = h1(module)
        ensure_budget("max_nodes", basis.order)
        shifts = [basis.combination(c) for c in basis.elements()]
    else:
        shifts = _cocycle_space(module)
    lifts = []
    for z in shifts:
        f = np.mod(f0 + z, step.modulus)
        images = [step.mul(step.decode(f[g]), sections[g]) for g in range(order)]
        lifts.append(images)
    if not is_lift_hom(gamma, step, lifts[0]):
        raise ConsistencyError("исправленный подъём не является гомоморфизмом")
    return LiftResult(status=LIFT_STATUS["lifted"], lifts=lifts, module=module)


def is_lift_hom(gamma: FiniteGroup, step, images: Sequence[Any]) -> bool:
    for s in gamma.generators:
        for g in range(gamma.order):
            if not step.equal(step.mul(images[s], images[g]), images[gamma.mul(s, g)]):
                return False
    return True


def pattern_chain(n: int, m: int, pattern, stop=frozenset()) -> List[PatternStep]:
    """Цепочка шагов T/stop → ... → T/pattern по длинам позиций"""
    chain = [PatternStep(n, m, hi, lo) for _, hi, lo in layers(make_pattern(n, pattern), make_pattern(n, stop))]
    return chain


def enumerate_lifts(gamma: FiniteGroup, steps: Sequence, phi: Sequence[Any],
                    max_nodes: Optional[int] = None) -> List[List[Any]]:
    """
    Все подъёмы φ через цепочку шагов (режим "all" на каждом шаге)

    Возвращает:
    - список образов всех элементов Γ в последней группе цепочки
    """
    limit = budget("max_nodes", max_nodes)
    frontier = [list(phi)]
    nodes = 0
    for step in steps:
        nxt = []
        for images in frontier:
            result = lift_abelian_kernel(gamma, step, images, mode="all")
            nodes += len(result.lifts)
            ensure_budget("max_nodes", nodes, limit)
            nxt.extend(result.lifts)
        frontier = nxt
    return frontier


@dataclass
class EmbeddingResult:
    """Ответ задачи вложения: образы порождающих Γ в U или "unsolvable" """

    status: str
    images: Optional[Dict[int, np.ndarray]] = field(repr=False, default=None)
    nodes: int = 0
    method: str = "tree"

    @property
    def solved(self) -> bool:
        return self.status == EMBEDDING_STATUS["solved"]


def _extend(gamma: FiniteGroup, quotient: MatrixQuotient, gen_images: Dict[int, np.ndarray]) -> Optional[List[np.ndarray]]:
    images = {s: quotient.normalize(x) for s, x in gen_images.items()}
    return extend_hom(gamma, images, quotient.mul, quotient.identity(),
                      lambda x, y: bool(np.array_equal(x, y)))


def brute_force_lifts(gamma: FiniteGroup, n: int, m: int, pattern, alpha: Dict[int, np.ndarray],
                      stop=frozenset()) -> List[Dict[int, np.ndarray]]:
    """
    Все гомоморфизмы Γ → T/stop, поднимающие ᾱ: Γ → T/K (перебор образов порождающих)

    Возвращает:
    - список {порождающий: матрица}
    """
    pattern = make_pattern(n, pattern)
    stop = make_pattern(n, stop)
    target = MatrixQuotient(n, m, stop)
    upper = MatrixQuotient(n, m, pattern)
    kernel = [target.normalize(k) for k in pattern_elements(n, m, pattern - stop)]
    unique = {target.key(k): k for k in kernel}
    kernel = list(unique.values())
    ensure_budget("brute_force_candidates", len(kernel) ** len(gamma.generators))
    base = {s: target.normalize(upper.normalize(alpha[s])) for s in gamma.generators}
    found = []
    for choice in itertools.product(range(len(kernel)), repeat=len(gamma.generators)):
        gens = {s: target.mul(kernel[c], base[s]) for s, c in zip(gamma.generators, choice)}
        if _extend(gamma, target, gens) is not None:
            found.append(gens)
    return found


def brute_force_homs(source: FiniteGroup, target: FiniteGroup) -> List[np.ndarray]:
    """Все гомоморфизмы табличных групп перебором образов порождающих"""
    ensure_budget("brute_force_candidates", target.order ** len(source.generators))
    found = []
    for choice in itertools.product(range(target.order), repeat=len(source.generators)):
        images = extend_hom(source, dict(zip(source.generators, choice)), target.mul,
                            target.identity, lambda x, y: x == y)
        if images is not None:
            found.append(np.array(images, dtype=np.int64))
    return found


def solve_embedding(gamma: FiniteGroup, n: int, m: int, pattern, alpha: Dict[int, np.ndarray],
                    max_nodes: Optional[int] = None, allow_brute_force: bool = True) -> EmbeddingResult:
    """
    Задача вложения: подъём ᾱ: Γ → U/K до Γ → U

    K раскладывается в цепочку слоёв по длинам позиций; на каждом слое
    решается абелев подъём с перебором решений с точностью до
    сопряжения ядром слоя (поиск в глубину с откатом). При малом
    числе кандидатов используется полный перебор.

    Параметры:
    - gamma: конечная группа Γ
    - n, m: U ⊂ GL_{n+1}(Z/m), m - степень простого
    - pattern: позиции нормальной подгруппы K (Z, U^m, P^{r,s}, U¹, ...)
    - alpha: образы порождающих Γ в U/K (матрицы)
    - max_nodes: переопределение бюджета узлов дерева

    Возвращает:
    - EmbeddingResult: "solved" с образами порождающих или "unsolvable"
    """
    if prime_power(m) is None:
        raise UnsupportedError(f"модуль {m} не является степенью простого")
    try:
        pattern = make_pattern(n, pattern)
    except InputError as exc:
        raise UnsupportedError(f"K не является подгруппой-шаблоном: {exc}") from exc
    missing = [s for s in gamma.generators if s not in alpha]
    if missing:
        raise InputError(f"не заданы образы порождающих {missing}")
    quotient = MatrixQuotient(n, m, pattern)
    base = _extend(gamma, quotient, alpha)
    if base is None:
        raise InputError("ᾱ не является гомоморфизмом Γ → U/K")
    candidates = (m ** len(pattern)) ** len(gamma.generators)
    if allow_brute_force and candidates <= budget("brute_force_candidates"):
        found = brute_force_lifts(gamma, n, m, pattern, alpha)
        logger.debug(f"задача вложения решена перебором: {len(found)} подъёмов")
        if found:
            return EmbeddingResult(status=EMBEDDING_STATUS["solved"], images=found[0], nodes=candidates,
                                   method="brute_force")
        return EmbeddingResult(status=EMBEDDING_STATUS["unsolvable"], nodes=candidates, method="brute_force")
    steps = pattern_chain(n, m, pattern)
    limit = budget("max_nodes", max_nodes)
    counter = {"nodes": 0}

    def dfs(depth: int, images: List[np.ndarray]) -> Optional[List[np.ndarray]]:
        if depth == len(steps):
            return images
        result = lift_abelian_kernel(gamma, steps[depth], images, mode="classes")
        for lift in result.lifts:
            counter["nodes"] += 1
            ensure_budget("max_nodes", counter["nodes"], limit)
            solution = dfs(depth + 1, lift)
            if solution is not None:
                return solution
        return None

    solution = dfs(0, base)
    logger.debug(f"задача вложения: {len(steps)} слоёв, {counter['nodes']} узлов")
    if solution is None:
        return EmbeddingResult(status=EMBEDDING_STATUS["unsolvable"], nodes=counter["nodes"])
    return EmbeddingResult(status=EMBEDDING_STATUS["solved"], images={s: solution[s] for s in gamma.generators},
                           nodes=counter["nodes"])


def verify_embedding(gamma: FiniteGroup, n: int, m: int, pattern, alpha: Dict[int, np.ndarray],
                     result: EmbeddingResult) -> bool:
    """Ответ - гомоморфизм в U, поднимающий ᾱ"""
    if not result.solved:
        return True
    full = MatrixQuotient(n, m, frozenset())
    upper = MatrixQuotient(n, m, make_pattern(n, pattern))
    if _extend(gamma, full, result.images) is None:
        return False
    return all(np.array_equal(upper.normalize(result.images[s]), upper.normalize(alpha[s]))
               for s in gamma.generators)


def quotient_homs(gamma: FiniteGroup, n: int, m: int, pattern,
                  max_elems: Optional[int] = None) -> List[Dict[int, np.ndarray]]:
    """
    Все гомоморфизмы Γ → U/K перебором образов порождающих

    Параметры:
    - gamma: конечная группа Γ
    - n, m: U ⊂ GL_{n+1}(Z/m)
    - pattern: позиции K
    - max_elems: переопределение бюджета перебора

    Возвращает:
    - список {порождающий: нормальная форма в U/K}
    """
    pattern = make_pattern(n, pattern)
    quotient = MatrixQuotient(n, m, pattern)
    full = frozenset((i, j) for i in range(n + 1) for j in range(i + 1, n + 1))
    unique = {}
    for x in pattern_elements(n, m, full - pattern):
        x = quotient.normalize(x)
        unique.setdefault(quotient.key(x), x)
    reps = list(unique.values())
    ensure_budget("max_elems", len(reps) ** len(gamma.generators), max_elems)
    found = []
    for choice in itertools.product(reps, repeat=len(gamma.generators)):
        gens = dict(zip(gamma.generators, choice))
        if _extend(gamma, quotient, gens) is not None:
            found.append(gens)
    return found


def verify_solver(groups: Sequence[FiniteGroup], n: int, m: int, kernels: Dict[str, Any],
                  max_nodes: Optional[int] = None) -> Dict[str, Any]:
    """
    Сверка поиска по слоям с полным перебором подъёмов

    Для каждой группы, каждого ядра K и каждого ᾱ: Γ → U/K ответ
    solve_embedding без перебора должен совпасть с наличием подъёма
    у brute_force_lifts, а найденный подъём - пройти verify_embedding.

    Возвращает:
    - отчёт: число случаев, расхождения (первые 5), passed
    """
    instances = 0
    solvable = 0
    mismatches = []
    for group in groups:
        for label, pattern in kernels.items():
            for alpha in quotient_homs(group, n, m, pattern):
                instances += 1
                tree = solve_embedding(group, n, m, pattern, alpha, max_nodes=max_nodes, allow_brute_force=False)
                oracle = bool(brute_force_lifts(group, n, m, pattern, alpha))
                solvable += oracle
                if tree.solved != oracle or not verify_embedding(group, n, m, pattern, alpha, tree):
                    mismatches.append({"group": group.name, "kernel": label, "tree": tree.status,
                                       "oracle": oracle, "alpha": {s: a.tolist() for s, a in alpha.items()}})
        logger.debug(f"сверка решателя: {group.name}, {instances} случаев")
    logger.info(f"сверка решателя: {instances} случаев, {len(mismatches)} расхождений")
    return {"instances": instances, "solvable": solvable, "mismatches": len(mismatches),
            "witnesses": mismatches[:5], "passed": not mismatches}
