"""
Модуль задачи о группе Брауэра
Отвечает за группу G ⊆ A × (Z/e)*, порождённую парами (a, c), и за
двойственные модули B̂ = Hom(B, Z/e) и B̂_0 с действием, скрученным χ
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime

from modules.cohom.gmodule import GModule
from modules.cohom.groups import FiniteGroup
from modules.conjact.classes import ConjClasses, conj_classes
from modules.conjact.exponent import OuterExponent, outer_exponent
from modules.conjact.invariants import ActionTables
from modules.modarith.residue import is_unit, require_prime, unit_inverse
from modules.unigroup.unitri import AVec, b0_positions, b_action_matrix, b_positions
from utils.errors import InputError, UnsupportedError
from utils.helpers import ensure_budget

logger = logging.getLogger(__name__)

Element = Tuple[Tuple[int, ...], int]

_TABLES: Dict[Tuple[int, int], Tuple[ActionTables, OuterExponent]] = {}


def action_context(n: int, p: int, max_elems: Optional[int] = None) -> Tuple[ActionTables, OuterExponent]:
    """Классы U¹, таблицы действия A и внешний показатель (кэш по (n, p))"""
    key = (n, p)
    if key not in _TABLES:
        classes: ConjClasses = conj_classes(n, p, max_elems=max_elems)
        _TABLES[key] = (ActionTables(classes), outer_exponent(n, p, classes=classes))
    return _TABLES[key]


@dataclass(eq=False)
class BrauerProblem:
    """
    Группа G ⊆ A × (Z/e)*

    elements[g] = (a, c): a - координаты в A, c = χ(g) ∈ (Z/e)*.
    """

    n: int
    p: int
    exponent: int
    elements: List[Element] = field(repr=False)
    group: FiniteGroup = field(repr=False)
    tables: ActionTables = field(repr=False)
    generators: List[Element] = field(repr=False, default_factory=list)

    @property
    def order(self) -> int:
        return self.group.order

    def avec(self, g: int) -> AVec:
        return AVec(self.p, self.elements[g][0])

    def chi(self, g: int) -> int:
        return self.elements[g][1]

    def chi_surjective(self) -> bool:
        """χ: G → (Z/p)* сюръективен"""
        units = {u for u in range(1, self.p)}
        return {c % self.p for _, c in self.elements} == units

    def describe(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "p": self.p,
            "outer_exponent": self.exponent,
            "order": self.order,
            "generators": [[list(a), c] for a, c in self.generators],
        }


def _closure(generators: Sequence[Element], p: int, e: int) -> List[Element]:
    identity: Element = (tuple([0] * len(generators[0][0])) if generators else (), 1)
    found = {identity: None}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for a, c in generators:
                y = (tuple((u + v) % p for u, v in zip(x[0], a)), (x[1] * c) % e)
                if y not in found:
                    found[y] = None
                    nxt.append(y)
        frontier = nxt
        ensure_budget("max_table_order", len(found))
    return sorted(found)


def _table(elements: List[Element], p: int, e: int) -> np.ndarray:
    index = {x: i for i, x in enumerate(elements)}
    size = len(elements)
    table = np.zeros((size, size), dtype=np.int64)
    for i, (a, c) in enumerate(elements):
        for j, (b, d) in enumerate(elements):
            table[i, j] = index[(tuple((u + v) % p for u, v in zip(a, b)), (c * d) % e)]
    return table


def build_problem(n: int, p: int, generators: Sequence[Tuple[Sequence[int], int]],
                  max_elems: Optional[int] = None) -> BrauerProblem:
    """
    Построение G по порождающим (a, c) ∈ A × (Z/e)*

    Параметры:
    - n, p: размер и простое
    - generators: пары (координаты в A, значение χ); при e = 2 значение
      χ можно опустить (None) - группа (Z/2)* тривиальна
    - max_elems: бюджет перечисления классов U¹

    Возвращает:
    - BrauerProblem
    """
    require_prime(p)
    if n < 3:
        raise InputError(f"формула рассматривается при n >= 3, получено {n}")
    tables, exponent = action_context(n, p, max_elems)
    e = exponent.outer_exponent
    if not isprime(e):
        raise UnsupportedError(f"внешний показатель {e} составной: формула поддерживается только при простом e")
    gens: List[Element] = []
    for i, item in enumerate(generators):
        a, c = (item[0], item[1]) if len(item) > 1 else (item[0], None)
        a = tuple(int(v) % p for v in a)
        if len(a) != n:
            raise InputError(f"ожидалось {n} координат A", path=f"generators[{i}]")
        c = 1 if c is None else int(c) % e
        if not is_unit(c, e):
            raise InputError(f"χ = {c} не обратим по модулю {e}", path=f"generators[{i}]")
        if e == 2 and c != 1:
            raise InputError("при e = 2 характер χ тривиален", path=f"generators[{i}]")
        gens.append((a, c))
    elements = _closure(gens, p, e) if gens else [(tuple([0] * n), 1)]
    table = _table(elements, p, e)
    index = {x: i for i, x in enumerate(elements)}
    gen_ids = sorted({index[g] for g in gens if index[g] != index[(tuple([0] * n), 1)]})
    group = FiniteGroup(table, generators=gen_ids or None, name=f"G(n={n},p={p})", validate=False)
    logger.info(f"G ⊆ A × (Z/{e})*: n={n}, p={p}, |G|={group.order}")
    return BrauerProblem(n=n, p=p, exponent=e, elements=elements, group=group, tables=tables, generators=gens)


@dataclass(eq=False)
class DualBModule:
    """
    Двойственный модуль Hom(B', Z/e) для B' = B или B_0

    positions - базис B' (позиции ē_{i,j}); module - G-модуль с действием
    (σf)(b) = χ(σ)·f(σ_A^{-1}·b); b_action - действие G на самом B'.
    """

    positions: Tuple[Tuple[int, int], ...]
    module: GModule = field(repr=False)
    b_action: np.ndarray = field(repr=False)
    chi: np.ndarray = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.positions)

    def pairing_ok(self) -> bool:
        """⟨σf, σb⟩ = χ(σ)⟨f, b⟩ для всех σ ∈ G"""
        m = self.module.modulus
        eye = np.eye(self.rank, dtype=np.int64)
        lhs = np.mod(np.einsum("gji,gjk->gik", self.module.action, self.b_action), m)
        return bool((lhs == np.mod(self.chi[:, None, None] * eye[None], m)).all())


def _dual(problem: BrauerProblem, positions: Tuple[Tuple[int, int], ...], name: str) -> DualBModule:
    basis = b_positions(problem.n)
    cols = [basis.index(pos) for pos in positions]
    rest = [t for t in range(len(basis)) if t not in cols]
    e = problem.exponent
    order = problem.order
    b_action = np.zeros((order, len(cols), len(cols)), dtype=np.int64)
    action = np.zeros_like(b_action)
    for g in range(order):
        s = problem.avec(g)
        full = b_action_matrix(s)
        if np.mod(full[np.ix_(rest, cols)], e).any():
            raise InputError(f"подмодуль {name} не инвариантен под действием A")
        inverse = b_action_matrix(-s)[np.ix_(cols, cols)]
        b_action[g] = np.mod(full[np.ix_(cols, cols)], e)
        action[g] = np.mod(problem.chi(g) * inverse.T, e)
    module = GModule(problem.group, e, action, name=name)
    chi = np.array([problem.chi(g) for g in range(order)], dtype=np.int64)
    return DualBModule(positions=tuple(positions), module=module, b_action=b_action, chi=chi)


def dual_B(problem: BrauerProblem) -> DualBModule:
    """B̂ = Hom(B, Z/e), ранг = #{(i, j) : 2 <= j - i <= 3}"""
    return _dual(problem, b_positions(problem.n), "B^")


def dual_B0(problem: BrauerProblem) -> DualBModule:
    """B̂_0 = Hom(B_0, Z/e), B_0 = ⟨ē_{0,2}, ē_{0,3}, ē_{n-3,n}, ē_{n-2,n}⟩"""
    return _dual(problem, b0_positions(problem.n), "B0^")


def chi_inverse(problem: BrauerProblem, g: int) -> int:
    return unit_inverse(problem.chi(g), problem.exponent)
