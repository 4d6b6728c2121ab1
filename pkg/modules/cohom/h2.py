"""
Модуль вторых когомологий
Отвечает за H² через нормализованную бар-резольвенту, H²(G, Q/Z)
через коэффициенты Z/N по модулю классов переноса и мультипликатор
Богомолова B₀(G)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint

from modules.cohom.gmodule import GModule, trivial
from modules.cohom.groups import FiniteGroup
from modules.cohom.h1 import cocycle_matrix
from modules.modarith.dense import RowReducer, kernel_array
from modules.modarith.smith import cokernel, kernel_generators, smith_array, solve_pk
from modules.modarith.sparse import SparseMat, sparse_kernel_fp, sparse_rank_fp
from utils.errors import UnsupportedError
from utils.helpers import budget, ensure_budget, parallel_map, progress

logger = logging.getLogger(__name__)


class NormalizedCochains:
    """
    Координаты нормализованных 2-коцепей: c(e, ·) = c(·, e) = 0

    Пара (g, h) неединичных элементов и компонента t дают индекс
    (pos[g]·(|G|-1) + pos[h])·k + t.
    """

    def __init__(self, group: FiniteGroup, rank: int = 1):
        self.group = group
        self.rank = rank
        self.others = np.array([g for g in range(group.order) if g != group.identity], dtype=np.int64)
        self.pos = np.full(group.order, -1, dtype=np.int64)
        self.pos[self.others] = np.arange(self.others.size)
        self.width = self.others.size
        self.dim = self.width * self.width * rank

    def index(self, g: int, h: int, t: int = 0) -> int:
        return int((self.pos[g] * self.width + self.pos[h]) * self.rank + t)

    def to_full(self, vec: np.ndarray) -> np.ndarray:
        """Вектор -> массив (|G|, |G|, k) с нулями на нейтральном"""
        n = self.group.order
        full = np.zeros((n, n, self.rank), dtype=np.int64)
        block = np.asarray(vec, dtype=np.int64).reshape(self.width, self.width, self.rank)
        full[np.ix_(self.others, self.others)] = block
        return full

    def from_full(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=np.int64).reshape(self.group.order, self.group.order, self.rank)
        return c[np.ix_(self.others, self.others)].reshape(-1)

    def restrict(self, vectors: np.ndarray, elements: np.ndarray, sub: "NormalizedCochains") -> np.ndarray:
        """Ограничение векторов-строк на подгруппу с вложением elements"""
        vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, self.width, self.width, self.rank)
        inner = self.pos[np.asarray(elements)[sub.others]]
        return vectors[:, inner][:, :, inner].reshape(vectors.shape[0], -1)


def _delta2_rows(module: GModule, cochains: NormalizedCochains) -> List[Dict[int, int]]:
    """
    Строки δ: C² → C³ на тройках (s, h, l), s - порождающий, h, l ≠ e

    Нормализованная коцепь c с δc(s, ·, ·) = 0 является коциклом:
    для D = δc имеем D(sh, ·, ·) = s·D(h, ·, ·) и D(e, ·, ·) = 0.
    """
    g = module.group
    k = module.rank
    m = module.modulus
    e = g.identity
    rows = []
    for s in g.generators:
        act = module.action[s]
        for h in cochains.others:
            sh = g.mul(s, int(h))
            for l in cochains.others:
                hl = g.mul(int(h), int(l))
                for t in range(k):
                    row: Dict[int, int] = {}

                    def put(col: int, value: int) -> None:
                        row[col] = (row.get(col, 0) + value) % m

                    for u in range(k):
                        if act[t, u]:
                            put(cochains.index(int(h), int(l), u), int(act[t, u]))
                    if sh != e:
                        put(cochains.index(sh, int(l), t), -1)
                    if hl != e:
                        put(cochains.index(s, hl, t), 1)
                    put(cochains.index(s, int(h), t), -1)
                    row = {c: v for c, v in row.items() if v}
                    if row:
                        rows.append(row)
    return rows


def normalized_coboundaries(module: GModule, cochains: NormalizedCochains) -> np.ndarray:
    """∂ базисных нормализованных 1-коцепей δ_{g,t}, g ≠ e (строки)"""
    g = module.group
    k = module.rank
    m = module.modulus
    vectors = []
    for x in cochains.others:
        for t in range(k):
            f = np.zeros((g.order, k), dtype=np.int64)
            f[x, t] = 1
            acted = np.einsum("gij,hj->ghi", module.action, f)
            full = np.mod(acted - f[g.table] + f[:, None, :], m)
            vectors.append(cochains.from_full(full))
    return np.array(vectors, dtype=np.int64).reshape(len(vectors), cochains.dim)


@dataclass
class H2Result:
    """
    H²(G, M) над F_p

    z2 - базис нормализованных коциклов (строки) или None в режиме
    «только ранг»; reps - представители классов.
    """

    dimension: int
    z2_dim: int
    b2_dim: int
    modulus: int
    cochains: NormalizedCochains = field(repr=False)
    z2: Optional[np.ndarray] = field(repr=False, default=None)
    reps: List[np.ndarray] = field(repr=False, default_factory=list)


def h2_bar(module: GModule, with_basis: bool = True) -> H2Result:
    """
    H²(G, M) через нормализованную бар-резольвенту над F_p

    Параметры:
    - module: G-модуль над F_p
    - with_basis: нужны ли коциклы (|G| <= h2_full_basis_order), иначе
      только размерность (|G| <= h2_rank_only_order)

    Возвращает:
    - H2Result: dim Z² - dim B², dim B² = (|G|-1)·k - dim Z¹
    """
    p, k = module.prime_power
    if k != 1:
        raise UnsupportedError("h2_bar работает над F_p; для Z/p^k используется h2_pk")
    g = module.group
    if with_basis and g.order > budget("h2_full_basis_order"):
        logger.info(f"|G|={g.order} больше h2_full_basis_order, считается только ранг")
        with_basis = False
    ensure_budget("h2_rank_only_order", g.order)
    cochains = NormalizedCochains(g, module.rank)
    rows = _delta2_rows(module, cochains)
    delta = SparseMat.from_rows(rows, cochains.dim, p)
    zmat = cocycle_matrix(module)
    z1_dim = zmat.shape[1] - len(RowReducer(zmat.shape[1], p, zmat).pivots)
    b2_dim = cochains.width * module.rank - z1_dim
    if not with_basis:
        z2_dim = cochains.dim - sparse_rank_fp(delta, p)
        return H2Result(dimension=z2_dim - b2_dim, z2_dim=z2_dim, b2_dim=b2_dim, modulus=p, cochains=cochains)
    z2 = sparse_kernel_fp(delta, p)
    span = RowReducer(cochains.dim, p, normalized_coboundaries(module, cochains))
    reps = []
    for z in z2:
        if span.add(z):
            reps.append(cochains.to_full(z))
    logger.debug(f"H2 над F_{p}: |G|={g.order}, dim Z2={z2.shape[0]}, dim B2={b2_dim}, dim H2={len(reps)}")
    return H2Result(dimension=len(reps), z2_dim=int(z2.shape[0]), b2_dim=b2_dim, modulus=p,
                    cochains=cochains, z2=z2, reps=reps)


def _dense_delta2(module: GModule, cochains: NormalizedCochains) -> np.ndarray:
    rows = _delta2_rows(module, cochains)
    dense = np.zeros((len(rows), cochains.dim), dtype=np.int64)
    for r, row in enumerate(rows):
        for c, v in row.items():
            dense[r, c] = v
    return dense


def _hom_generators(group: FiniteGroup, q: int) -> List[np.ndarray]:
    """Порождающие Hom(G, Z/q) как функции на элементах"""
    p, k = next(iter(factorint(q).items()))
    gens = kernel_generators(cocycle_matrix(trivial(group, q)), p, k)
    return [np.mod(v, q).reshape(-1) for v, _ in gens]


def carry_cocycle(phi: np.ndarray, group: FiniteGroup, q: int) -> np.ndarray:
    """Класс переноса гомоморфизма φ: G → Z/q: c(g, h) = (φ(g) + φ(h) - φ(gh)) / q"""
    phi = np.mod(np.asarray(phi, dtype=np.int64), q)
    total = phi[:, None] + phi[None, :] - phi[group.table]
    return (total // q).reshape(group.order, group.order, 1)


def h2_pk(module: GModule, extra_relations: Sequence[np.ndarray] = ()) -> List[int]:
    """
    Инвариантные множители H²(G, M) над Z/p^k (плотный путь Смита)

    Параметры:
    - extra_relations: дополнительные нормализованные коциклы, по
      которым берётся фактор (классы переноса для Q/Z)
    """
    p, k = module.prime_power
    g = module.group
    ensure_budget("h2_pk_order", g.order)
    q = p ** k
    cochains = NormalizedCochains(g, module.rank)
    if cochains.dim == 0:
        return []
    gens = kernel_generators(_dense_delta2(module, cochains), p, k)
    if not gens:
        return []
    zcols = np.stack([v for v, _ in gens], axis=1)
    form = smith_array(zcols, p, k)
    relations = []
    for vec in list(normalized_coboundaries(module, cochains)) + [cochains.from_full(c) for c in extra_relations]:
        coords = solve_pk(zcols, vec, p, k, form=form)
        if coords is None:
            raise UnsupportedError("соотношение не лежит в пространстве коциклов")
        relations.append(coords)
    for i, (_, order) in enumerate(gens):
        rel = np.zeros(len(gens), dtype=np.int64)
        rel[i] = order
        relations.append(rel)
    return list(cokernel(np.array(relations, dtype=np.int64), len(gens), p, k).invariants)


def p_part(n: int, p: int) -> int:
    return p ** factorint(n).get(p, 0)


def h2_qz(group: FiniteGroup) -> Dict[int, List[int]]:
    """
    H²(G, Q/Z) по простым: H²(G, Z/N) / (классы переноса Hom(G, Z/N))

    N - p-часть |G|; последовательность 0 → Z → Z → Z/N → 0 даёт
    H²(G, Z/N) → H²(G, Q/Z)[N] → 0 с ядром - образом H²(G, Z).

    Возвращает:
    - простое p -> инвариантные множители p-части
    """
    result = {}
    for p in group.primes():
        q = p_part(group.order, p)
        module = trivial(group, q)
        carries = [carry_cocycle(phi, group, q) for phi in _hom_generators(group, q)]
        result[p] = [inv for inv in h2_pk(module, carries) if inv > 1]
    return result


def _reduce_rows(reducer: RowReducer, mat: np.ndarray) -> np.ndarray:
    out = np.mod(np.array(mat, dtype=np.int64), reducer.p)
    for row, c in zip(reducer.rows, reducer.pivots):
        coef = out[:, c].copy()
        if coef.any():
            out = np.mod(out - coef[:, None] * row[None, :], reducer.p)
    return out


def _carry_vectors(group: FiniteGroup, p: int, cochains: NormalizedCochains) -> List[np.ndarray]:
    q = p_part(group.order, p)
    if q == 1:
        return []
    return [np.mod(cochains.from_full(carry_cocycle(phi, group, q)), p) for phi in _hom_generators(group, q)]


@dataclass
class BogomolovResult:
    """
    B₀(G) по простым: dim над F_p p-кручения B₀(G)[p]

    proxy - H²(G, Q/Z) через коэффициенты Z/N (None вне бюджета h2_pk_order).
    """

    order: int
    primes: Dict[int, int]
    bicyclic: int
    proxy: Optional[Dict[int, List[int]]] = None
    method: str = "exact p-torsion over F_p"

    @property
    def trivial(self) -> bool:
        return all(dim == 0 for dim in self.primes.values())


def _bicyclic_data(group: FiniteGroup, p: int, elements: Tuple[int, ...]):
    sub, emb = group.subgroup(sorted(elements))
    cochains = NormalizedCochains(sub)
    module = trivial(sub, p)
    vectors = list(normalized_coboundaries(module, cochains)) + _carry_vectors(sub, p, cochains)
    reducer = RowReducer(cochains.dim, p, np.array(vectors, dtype=np.int64).reshape(-1, cochains.dim))
    return emb, cochains, reducer


def bogomolov_p(group: FiniteGroup, p: int, workers: Optional[int] = None) -> int:
    """
    dim B₀(G)[p]

    B₀(G)[p] = {[y] ∈ H²(G, F_p) : y|_A ∈ B²(A) + Carry(A) для всех
    бициклических A} / Carry(G), где H²(G, F_p)/Carry(G) ≅ H²(G, Q/Z)[p].
    """
    ensure_budget("h2_full_basis_order", group.order)
    module = trivial(group, p)
    result = h2_bar(module, with_basis=True)
    cochains = result.cochains
    base = RowReducer(cochains.dim, p, np.concatenate(
        [normalized_coboundaries(module, cochains)] +
        [v.reshape(1, -1) for v in _carry_vectors(group, p, cochains)], axis=0))
    quotient_dim = result.z2_dim - base.rank
    if quotient_dim == 0:
        return 0
    z2 = result.z2
    subgroups = [a for _, a in group.bicyclic_subgroups(maximal=True)]
    data = parallel_map(lambda a: _bicyclic_data(group, p, tuple(a)), subgroups, workers)
    blocks = []
    for emb, sub_cochains, reducer in progress(data, desc=f"bogomolov p={p}", total=len(data)):
        if sub_cochains.dim == 0:
            continue
        restricted = cochains.restrict(z2, emb, sub_cochains)
        blocks.append(_reduce_rows(reducer, restricted).T)
    if not blocks:
        return quotient_dim
    conditions = np.concatenate(blocks, axis=0)
    kernel = kernel_array(conditions, p)
    dim = int(kernel.shape[0]) - base.rank
    logger.debug(f"B0[{p}]: |G|={group.order}, {len(subgroups)} бициклических, dim={dim}")
    return dim


def bogomolov(group: FiniteGroup, workers: Optional[int] = None) -> BogomolovResult:
    """
    Мультипликатор Богомолова: ядро ограничения H²(G, Q/Z) на все
    бициклические подгруппы; B₀ = 0 тогда и только тогда, когда B₀[p] = 0
    для всех p
    """
    primes = {p: bogomolov_p(group, p, workers) for p in group.primes()}
    proxy = h2_qz(group) if group.order <= budget("h2_pk_order") else None
    return BogomolovResult(order=group.order, primes=primes,
                           bicyclic=len(group.bicyclic_subgroups(maximal=True)), proxy=proxy)
