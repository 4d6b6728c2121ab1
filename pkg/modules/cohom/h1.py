"""
Модуль первых когомологий
Отвечает за Z¹/B¹ над F_p и Z/p^k, ограничение на подгруппы и Ш¹_cyc
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from modules.cohom.gmodule import GModule
from modules.modarith.dense import RowReducer, kernel_array, solve_array_fp
from modules.modarith.smith import cokernel, kernel_generators, smith_array, solve_pk
from utils.errors import CheckFailure, InputError, UnsupportedError
from utils.helpers import ensure_budget

logger = logging.getLogger(__name__)


def cocycle_matrix(module: GModule) -> np.ndarray:
    """
    Матрица условий коцикла на (Z/m)^{|G|·k}

    Строки: f(sh) - f(s) - s·f(h) = 0 для порождающих s и всех h,
    и f(e) = 0. Для порождающих этого достаточно: условие переносится
    на произведения индукцией по длине слова.
    """
    g = module.group
    k = module.rank
    size = g.order * k
    eye = np.eye(k, dtype=np.int64)
    blocks = []
    for s in g.generators:
        for h in range(g.order):
            block = np.zeros((k, size), dtype=np.int64)
            sh = g.mul(s, h)
            block[:, sh * k:(sh + 1) * k] += eye
            block[:, s * k:(s + 1) * k] -= eye
            block[:, h * k:(h + 1) * k] -= module.action[s]
            blocks.append(block)
    start = np.zeros((k, size), dtype=np.int64)
    start[:, g.identity * k:(g.identity + 1) * k] = eye
    blocks.append(start)
    return np.mod(np.concatenate(blocks, axis=0), module.modulus)


def coboundary_generators(module: GModule) -> np.ndarray:
    """Кограницы g ↦ g·e_t - e_t базисных векторов (строки длины |G|·k)"""
    eye = np.eye(module.rank, dtype=np.int64)
    gens = module.action - eye[None]
    return np.mod(np.transpose(gens, (2, 0, 1)).reshape(module.rank, -1), module.modulus)


def coboundary1(module: GModule, m) -> np.ndarray:
    """1-кограница g ↦ g·m - m"""
    m = np.asarray(m, dtype=np.int64)
    return np.mod(module.action @ m - m[None, :], module.modulus)


def is_cocycle1(module: GModule, f: np.ndarray) -> bool:
    """f(gh) = f(g) + g·f(h) на всех |G|² парах"""
    g = module.group
    f = np.mod(np.asarray(f, dtype=np.int64).reshape(g.order, module.rank), module.modulus)
    rhs = f[:, None, :] + np.einsum("gij,hj->ghi", module.action, f)
    return bool((f[g.table] == np.mod(rhs, module.modulus)).all())


@dataclass
class H1Basis:
    """
    H¹(G, M) = Z¹/B¹

    reps - представители-коциклы (массивы |G| x k), invariants - порядки
    соответствующих циклических слагаемых (над F_p все равны p).
    """

    module: GModule = field(repr=False)
    reps: List[np.ndarray] = field(repr=False)
    invariants: List[int]
    z1_dim: int
    b1_dim: int
    _coords: object = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return len(self.reps)

    @property
    def order(self) -> int:
        result = 1
        for inv in self.invariants:
            result *= inv
        return result

    def coordinates(self, f: np.ndarray) -> Tuple[int, ...]:
        """Координаты класса коцикла f в базисе reps"""
        return self._coords(np.asarray(f, dtype=np.int64).reshape(-1))

    def is_coboundary(self, f: np.ndarray) -> bool:
        return not any(self.coordinates(f))

    def combination(self, coords: Sequence[int]) -> np.ndarray:
        """Коцикл Σ c_i·reps_i"""
        m = self.module.modulus
        total = np.zeros((self.module.group.order, self.module.rank), dtype=np.int64)
        for c, rep in zip(coords, self.reps):
            total = np.mod(total + int(c) * rep, m)
        return total

    def elements(self) -> List[Tuple[int, ...]]:
        """Все элементы H¹ в координатах"""
        return list(itertools.product(*(range(inv) for inv in self.invariants)))


def h1(module: GModule) -> H1Basis:
    """
    Базис H¹(G, M)

    Параметры:
    - module: G-модуль над F_p или Z/p^k

    Возвращает:
    - H1Basis; над Z/p^k дополнительно инвариантные множители (путь Смита)
    """
    p, k = module.prime_power
    g = module.group
    ensure_budget("max_table_order", g.order)
    zmat = cocycle_matrix(module)
    bgens = coboundary_generators(module)
    size = g.order * module.rank
    if k == 1:
        return _h1_fp(module, zmat, bgens, size, p)
    return _h1_pk(module, zmat, bgens, size, p, k)


def _h1_fp(module: GModule, zmat: np.ndarray, bgens: np.ndarray, size: int, p: int) -> H1Basis:
    z1 = kernel_array(zmat, p)
    boundary = RowReducer(size, p, bgens)
    b1_dim = boundary.rank
    span = RowReducer(size, p, bgens)
    reps = []
    for z in z1:
        if span.add(z):
            reps.append(z.reshape(module.group.order, module.rank))
    columns = np.array([r.reshape(-1) for r in reps] + list(boundary.rows), dtype=np.int64).reshape(-1, size).T
    dim = len(reps)

    def coords(f: np.ndarray) -> Tuple[int, ...]:
        if dim == 0:
            return ()
        x = solve_array_fp(columns, f, p)
        if x is None:
            raise InputError("вектор не является коциклом")
        return tuple(int(v) for v in x[:dim])

    logger.debug(f"H1 над F_{p}: dim Z1={z1.shape[0]}, dim B1={b1_dim}, dim H1={dim}")
    return H1Basis(module=module, reps=reps, invariants=[p] * dim, z1_dim=int(z1.shape[0]),
                   b1_dim=b1_dim, _coords=coords)


def _h1_pk(module: GModule, zmat: np.ndarray, bgens: np.ndarray, size: int, p: int, k: int) -> H1Basis:
    q = p ** k
    gens = kernel_generators(zmat, p, k)
    if not gens:
        return H1Basis(module=module, reps=[], invariants=[], z1_dim=0, b1_dim=0,
                       _coords=lambda f: ())
    zcols = np.stack([v for v, _ in gens], axis=1)
    form = smith_array(zcols, p, k)

    def z_coords(f: np.ndarray) -> np.ndarray:
        c = solve_pk(zcols, f, p, k, form=form)
        if c is None:
            raise InputError("вектор не является коциклом")
        return c

    relations = [z_coords(b) for b in bgens]
    for i, (_, order) in enumerate(gens):
        rel = np.zeros(len(gens), dtype=np.int64)
        rel[i] = order
        relations.append(rel)
    quotient = cokernel(np.array(relations, dtype=np.int64), len(gens), p, k)
    reps = [np.mod(zcols @ gen, q).reshape(module.group.order, module.rank) for gen in quotient.generators]
    logger.debug(f"H1 над Z/{q}: инварианты {quotient.invariants}")

    def coords(f: np.ndarray) -> Tuple[int, ...]:
        return quotient.coordinates(z_coords(f))

    return H1Basis(module=module, reps=reps, invariants=list(quotient.invariants),
                   z1_dim=len(gens), b1_dim=len(bgens), _coords=coords)


def h1_order_brute(module: GModule) -> int:
    """
    |H¹| перебором значений на порождающих

    Коцикл определяется значениями на порождающих; кандидат продолжается
    по дереву обхода и проверяется на всех парах. |B¹| = |M| / |M^G|.
    """
    g = module.group
    m = module.modulus
    k = module.rank
    ensure_budget("brute_force_candidates", module.size ** len(g.generators))
    vectors = np.indices((m,) * k).reshape(k, -1).T
    tree = g.spanning_tree()
    z1 = 0
    for values in itertools.product(range(vectors.shape[0]), repeat=len(g.generators)):
        f = np.zeros((g.order, k), dtype=np.int64)
        gen_value = {s: vectors[v] for s, v in zip(g.generators, values)}
        for x, s, h in tree:
            f[x] = np.mod(gen_value[s] + module.action[s] @ f[h], m)
        if all(np.array_equal(f[s], gen_value[s]) for s in g.generators) and is_cocycle1(module, f):
            z1 += 1
    eye = np.eye(k, dtype=np.int64)
    fixed = sum(1 for v in vectors if not np.mod((module.action - eye[None]) @ v, m).any())
    return z1 * fixed // vectors.shape[0]


@dataclass
class RestrictionMap:
    """Матрица ограничения H¹(G, M) → H¹(H, M) (столбцы - образы базиса)"""

    matrix: np.ndarray
    source: H1Basis = field(repr=False)
    target: H1Basis = field(repr=False)
    elements: np.ndarray = field(repr=False)

    def kernel(self) -> np.ndarray:
        """Ядро над F_p (строки - координаты в базисе источника)"""
        p = self.source.module.modulus
        if self.matrix.shape[0] == 0:
            return np.eye(self.source.dimension, dtype=np.int64)
        return kernel_array(self.matrix, p)

    def is_injective(self) -> bool:
        if self.source.module.prime_power[1] == 1:
            return self.kernel().shape[0] == 0
        trivial = [c for c in self.source.elements() if not any(self.target.coordinates(self.restrict(c)))]
        return len(trivial) == 1

    def restrict(self, coords: Sequence[int]) -> np.ndarray:
        return self.source.combination(coords)[self.elements]


def restrict_h1(module: GModule, elements: Sequence[int], basis: Optional[H1Basis] = None) -> RestrictionMap:
    """
    Ограничение H¹ на подгруппу

    Параметры:
    - module: G-модуль
    - elements: элементы подгруппы H (замкнутое подмножество)
    - basis: заранее посчитанный базис H¹(G, M)

    Возвращает:
    - RestrictionMap с матрицей в выбранных базисах
    """
    group = module.group
    sub, emb = group.subgroup(elements)
    basis = basis or h1(module)
    target = h1(module.restrict(emb, sub))
    cols = [target.coordinates(rep[emb]) for rep in basis.reps]
    matrix = np.array(cols, dtype=np.int64).reshape(len(cols), target.dimension).T
    return RestrictionMap(matrix=matrix, source=basis, target=target, elements=emb)


@dataclass
class ShaResult:
    """
    Ш¹_cyc(G, M) в координатах базиса H¹

    Над F_p basis - базис подпространства; над Z/p^k - все элементы.
    """

    basis: np.ndarray
    order: int
    h1: H1Basis = field(repr=False)
    cyclic_generators: List[int] = field(default_factory=list)

    @property
    def dimension(self) -> Optional[int]:
        if self.h1.module.prime_power[1] == 1:
            return int(self.basis.shape[0])
        return None

    def cocycles(self) -> List[np.ndarray]:
        return [self.h1.combination(c) for c in self.basis]


def sha1_cyc(module: GModule, basis: Optional[H1Basis] = None) -> ShaResult:
    """
    Ш¹_cyc: пересечение ядер ограничений на циклические подгруппы

    Достаточно максимальных циклических подгрупп <h>. Коцикл на <h>
    тривиален в H¹ тогда и только тогда, когда f(h) ∈ (h - 1)M.
    """
    basis = basis or h1(module)
    group = module.group
    p, k = module.prime_power
    gens = [h for h, _ in group.maximal_cyclic_subgroups()]
    eye = np.eye(module.rank, dtype=np.int64)
    if k == 1:
        if basis.dimension == 0:
            return ShaResult(basis=np.zeros((0, 0), dtype=np.int64), order=1, h1=basis, cyclic_generators=gens)
        rows = []
        for h in gens:
            image = RowReducer(module.rank, p, np.mod(module.action[h] - eye, p).T)
            rows.append(np.array([image.reduce(rep[h]) for rep in basis.reps], dtype=np.int64).T)
        conditions = np.concatenate(rows, axis=0)
        kernel = kernel_array(conditions, p)
        logger.debug(f"Ш¹_cyc: {len(gens)} максимальных циклических подгрупп, dim = {kernel.shape[0]}")
        return ShaResult(basis=kernel, order=p ** kernel.shape[0], h1=basis, cyclic_generators=gens)
    ensure_budget("brute_force_candidates", basis.order)
    forms = {h: smith_array(np.mod(module.action[h] - eye, module.modulus), p, k) for h in gens}
    members = []
    for coords in basis.elements():
        f = basis.combination(coords)
        if all(solve_pk(module.action[h] - eye, f[h], p, k, form=forms[h]) is not None for h in gens):
            members.append(coords)
    return ShaResult(basis=np.array(members, dtype=np.int64).reshape(len(members), len(basis.invariants)),
                     order=len(members), h1=basis, cyclic_generators=gens)


def check_basis(basis: H1Basis) -> None:
    """Представители - коциклы, линейно независимые по модулю кограниц"""
    for i, rep in enumerate(basis.reps):
        if not is_cocycle1(basis.module, rep):
            raise CheckFailure("представитель H¹ не является коциклом", witness={"index": i})
    for i in range(basis.dimension):
        unit = [0] * basis.dimension
        unit[i] = 1
        if tuple(basis.coordinates(basis.reps[i])) != tuple(unit):
            raise CheckFailure("представители H¹ зависимы по модулю B¹", witness={"index": i})


def require_fp(module: GModule) -> int:
    p, k = module.prime_power
    if k != 1:
        raise UnsupportedError(f"операция требует простого модуля, получено {module.modulus}")
    return p
