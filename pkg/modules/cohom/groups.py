"""
Модуль конечных групп
Отвечает за группы, заданные таблицей умножения: проверку закона,
подгруппы (циклические, бициклические), именованные группы и
продолжение гомоморфизмов с порождающих
"""

import logging
from collections import deque
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint

from config.settings import SCAN_CONFIG
from modules.modarith.dense import matmul_mod
from modules.modarith.residue import require_modulus, require_prime
from modules.unigroup.pattern import pattern_elements, u1_pattern
from modules.unigroup.unitri import b_positions, identity_matrix
from utils.errors import InputError
from utils.helpers import ensure_budget

logger = logging.getLogger(__name__)

Subgroup = FrozenSet[int]


class FiniteGroup:
    """
    Конечная группа как таблица умножения

    Элементы - числа 0..order-1, table[g, h] = gh. Закон проверяется при
    создании: тождество, обратные (латинский квадрат), ассоциативность
    (полностью при order <= 64, иначе на выборке троек).
    """

    def __init__(self, table, generators: Optional[Sequence[int]] = None,
                 labels: Optional[Sequence[str]] = None, name: str = "G", validate: bool = True):
        table = np.asarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise InputError("таблица умножения должна быть квадратной и непустой")
        ensure_budget("max_table_order", table.shape[0])
        self.table = table
        self.order = int(table.shape[0])
        self.name = name
        self.labels = list(labels) if labels is not None else None
        if validate:
            self._validate()
        rows = np.flatnonzero((table == np.arange(self.order)[None, :]).all(axis=1))
        if rows.size == 0:
            raise InputError(f"в таблице группы {name} нет нейтрального элемента")
        self.identity = int(rows[0])
        self.inverses = np.argmax(table == self.identity, axis=1).astype(np.int64)
        if generators is None:
            generators = self._greedy_generators()
        self.generators = [int(g) for g in generators]
        if len(self.closure(self.generators)) != self.order:
            raise InputError(f"элементы {self.generators} не порождают группу {name}")
        self._orders: Optional[np.ndarray] = None

    def _validate(self) -> None:
        n = self.order
        t = self.table
        if t.min() < 0 or t.max() >= n:
            raise InputError("значения таблицы вне диапазона номеров элементов")
        ref = np.arange(n)
        if not (np.sort(t, axis=1) == ref).all() or not (np.sort(t, axis=0) == ref[:, None]).all():
            raise InputError("таблица не является латинским квадратом (нет обратных)")
        if n <= 64:
            bad = np.argwhere(t[t] != t[:, t])
            if bad.size:
                a, b, c = (int(v) for v in bad[0])
                raise InputError(f"нарушена ассоциативность на тройке ({a}, {b}, {c})")
            return
        rng = np.random.default_rng(SCAN_CONFIG["seed"])
        a, b, c = rng.integers(0, n, size=(3, SCAN_CONFIG["associativity_samples"]))
        bad = np.flatnonzero(t[t[a, b], c] != t[a, t[b, c]])
        if bad.size:
            i = int(bad[0])
            raise InputError(f"нарушена ассоциативность на тройке ({a[i]}, {b[i]}, {c[i]})")

    def _greedy_generators(self) -> List[int]:
        gens: List[int] = []
        span = {self.identity}
        for g in range(self.order):
            if g not in span:
                gens.append(g)
                span = set(self.closure(gens))
                if len(span) == self.order:
                    break
        return gens

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverses[g])

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inv(g), -k
        result = self.identity
        for _ in range(k):
            result = self.mul(result, g)
        return result

    def element_orders(self) -> np.ndarray:
        """Порядки всех элементов"""
        if self._orders is None:
            orders = np.ones(self.order, dtype=np.int64)
            current = np.arange(self.order)
            done = current == self.identity
            step = 1
            while not done.all():
                current = self.table[current, np.arange(self.order)]
                step += 1
                hit = (current == self.identity) & ~done
                orders[hit] = step
                done |= hit
            self._orders = orders
        return self._orders

    def element_order(self, g: int) -> int:
        return int(self.element_orders()[g])

    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders()))

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def commute(self, g: int, h: int) -> bool:
        return self.table[g, h] == self.table[h, g]

    def primes(self) -> List[int]:
        return sorted(factorint(self.order))

    def closure(self, gens: Sequence[int]) -> Tuple[int, ...]:
        """Подгруппа, порождённая элементами (отсортированный кортеж)"""
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for s in gens:
                y = int(self.table[x, s])
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return tuple(sorted(seen))

    def is_subgroup(self, elements: Sequence[int]) -> bool:
        els = np.array(sorted(set(int(e) for e in elements)), dtype=np.int64)
        if els.size == 0 or self.identity not in set(els.tolist()):
            return False
        products = self.table[np.ix_(els, els)]
        return bool(np.isin(products, els).all())

    def cyclic_subgroup(self, g: int) -> Subgroup:
        return frozenset(self.closure([g]))

    def cyclic_subgroups(self) -> List[Subgroup]:
        seen: Dict[Subgroup, None] = {}
        for g in range(self.order):
            seen.setdefault(self.cyclic_subgroup(g), None)
        return list(seen)

    def maximal_cyclic_subgroups(self) -> List[Tuple[int, Subgroup]]:
        """Максимальные по включению циклические подгруппы вместе с порождающим"""
        found: Dict[Subgroup, int] = {}
        for g in range(self.order):
            found.setdefault(self.cyclic_subgroup(g), g)
        subgroups = list(found)
        maximal = [h for h in subgroups if not any(h < other for other in subgroups)]
        return [(found[h], h) for h in sorted(maximal, key=lambda h: (len(h), sorted(h)))]

    def bicyclic_subgroups(self, maximal: bool = True) -> List[Tuple[Tuple[int, int], Subgroup]]:
        """
        Бициклические подгруппы <g, h> с gh = hg (включая циклические)

        Параметры:
        - maximal: оставить только максимальные по включению

        Возвращает:
        - список ((g, h), подгруппа)
        """
        found: Dict[Subgroup, Tuple[int, int]] = {}
        for g in range(self.order):
            for h in range(g, self.order):
                if self.commute(g, h):
                    found.setdefault(frozenset(self.closure([g, h])), (g, h))
        subgroups = list(found)
        if maximal:
            subgroups = [a for a in subgroups if not any(a < b for b in subgroups)]
        subgroups.sort(key=lambda a: (len(a), sorted(a)))
        return [(found[a], a) for a in subgroups]

    def subgroup(self, elements: Sequence[int], generators: Optional[Sequence[int]] = None,
                 name: Optional[str] = None) -> Tuple["FiniteGroup", np.ndarray]:
        """
        Подгруппа как самостоятельная группа

        Возвращает:
        - (группа H, вложение: номер в H -> номер в G)
        """
        els = np.array(sorted(set(int(e) for e in elements)), dtype=np.int64)
        if not self.is_subgroup(els):
            raise InputError(f"множество {els.tolist()} не является подгруппой {self.name}")
        index = np.full(self.order, -1, dtype=np.int64)
        index[els] = np.arange(els.size)
        table = index[self.table[np.ix_(els, els)]]
        gens = None if generators is None else [int(index[g]) for g in generators if g != self.identity]
        if gens is not None and not gens:
            gens = None
        labels = [self.labels[e] for e in els] if self.labels else None
        sub = FiniteGroup(table, generators=gens, labels=labels,
                          name=name or f"{self.name}[{els.size}]", validate=False)
        return sub, els

    def spanning_tree(self) -> List[Tuple[int, int, int]]:
        """Обход в ширину: тройки (g, s, h) с g = s·h, h посещён раньше g"""
        seen = {self.identity}
        queue = deque([self.identity])
        tree = []
        while queue:
            h = queue.popleft()
            for s in self.generators:
                g = int(self.table[s, h])
                if g not in seen:
                    seen.add(g)
                    tree.append((g, s, h))
                    queue.append(g)
        return tree

    def label(self, g: int) -> str:
        return self.labels[g] if self.labels else str(g)


def extend_hom(group: FiniteGroup, gen_images: Dict[int, Any], mul: Callable[[Any, Any], Any],
               identity: Any, equal: Callable[[Any, Any], bool]) -> Optional[List[Any]]:
    """
    Продолжение отображения порождающих до гомоморфизма

    Параметры:
    - group: исходная группа
    - gen_images: порождающий -> образ
    - mul, identity, equal: операции целевой группы

    Возвращает:
    - список образов всех элементов или None, если это не гомоморфизм
    """
    images: List[Any] = [None] * group.order
    images[group.identity] = identity
    for g, s, h in group.spanning_tree():
        images[g] = mul(gen_images[s], images[h])
    for s in group.generators:
        for g in range(group.order):
            if not equal(mul(gen_images[s], images[g]), images[group.mul(s, g)]):
                return None
    return images


def is_table_hom(source: FiniteGroup, target: FiniteGroup, images: Sequence[int]) -> bool:
    """Проверка φ(gh) = φ(g)φ(h) на всех парах"""
    img = np.asarray(images, dtype=np.int64)
    return bool((img[source.table] == target.table[img[:, None], img[None, :]]).all())


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise InputError(f"порядок циклической группы должен быть >= 1, получено {n}")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, generators=[1 % n] if n > 1 else [0],
                       name=f"Z/{n}", validate=False)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """G × H: элемент (a, b) имеет номер a·|H| + b"""
    a = np.arange(g.order)
    b = np.arange(h.order)
    ga = g.table[a[:, None, None, None], a[None, None, :, None]]
    hb = h.table[b[None, :, None, None], b[None, None, None, :]]
    table = (ga * h.order + hb).reshape(g.order * h.order, g.order * h.order)
    gens = [s * h.order + h.identity for s in g.generators if s != g.identity]
    gens += [g.identity * h.order + t for t in h.generators if t != h.identity]
    return FiniteGroup(table, generators=gens or None, name=f"{g.name}x{h.name}", validate=False)


def dihedral(n: int) -> FiniteGroup:
    """D_n порядка 2n: r^i s^j имеет номер i + n·j"""
    if n < 2:
        raise InputError(f"диэдральная группа требует n >= 2, получено {n}")
    table = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for x in range(2 * n):
        a, b = x % n, x // n
        for y in range(2 * n):
            c, d = y % n, y // n
            table[x, y] = (a + (c if b == 0 else -c)) % n + n * ((b + d) % 2)
    return FiniteGroup(table, generators=[1, n], name=f"D{n}", validate=False)


def elementary_abelian(p: int, rank: int) -> FiniteGroup:
    require_prime(p)
    group = cyclic(p)
    for _ in range(rank - 1):
        group = direct_product(group, cyclic(p))
    group.name = f"(Z/{p})^{rank}"
    return group


def from_matrices(gens: Sequence[np.ndarray], m: int, name: str = "M") -> Tuple[FiniteGroup, np.ndarray]:
    """
    Группа, порождённая обратимыми матрицами над Z/m

    Возвращает:
    - (группа, массив матриц элементов в порядке номеров)
    """
    require_modulus(m)
    gens = [np.mod(np.asarray(g, dtype=np.int64), m) for g in gens]
    size = gens[0].shape[0]
    start = np.eye(size, dtype=np.int64)
    seen = {start.tobytes(): 0}
    elements = [start]
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = matmul_mod(x, g, m)
            key = y.tobytes()
            if key not in seen:
                ensure_budget("max_table_order", len(elements) + 1)
                seen[key] = len(elements)
                elements.append(y)
                queue.append(y)
    mats = np.array(elements, dtype=np.int64)
    return _table_group(mats, m, [seen[g.tobytes()] for g in gens], name), mats


def _table_group(mats: np.ndarray, m: int, generators: Optional[Sequence[int]], name: str) -> FiniteGroup:
    count = mats.shape[0]
    flat = mats.reshape(count, -1)
    if float(m) ** flat.shape[1] < 2.0 ** 62:
        weights = np.array([m ** t for t in range(flat.shape[1])], dtype=np.int64)
        codes = flat @ weights
        order = np.argsort(codes)
        sorted_codes = codes[order]
        table = np.zeros((count, count), dtype=np.int64)
        for a in range(count):
            prod = np.mod(np.einsum("ij,njk->nik", mats[a], mats), m).reshape(count, -1) @ weights
            table[a] = order[np.searchsorted(sorted_codes, prod)]
    else:
        lookup = {flat[i].tobytes(): i for i in range(count)}
        table = np.array([[lookup[matmul_mod(mats[a], mats[b], m).reshape(-1).tobytes()]
                           for b in range(count)] for a in range(count)], dtype=np.int64)
    gens = [g for g in (generators or []) if g != 0] or None
    return FiniteGroup(table, generators=gens, name=name, validate=False)


def quaternion() -> FiniteGroup:
    """Q_8 как подгруппа SL_2(F_3)"""
    i = np.array([[0, 1], [2, 0]])
    j = np.array([[1, 1], [1, 2]])
    group, _ = from_matrices([i, j], 3, name="Q8")
    return group


def unitriangular_u1(n: int, p: int) -> Tuple[FiniteGroup, np.ndarray]:
    """
    U¹ = [U, U] для U ⊂ GL_{n+1}(F_p) как группа-таблица

    Возвращает:
    - (группа, матрицы элементов); порождающие - e_{i,j} длины 2 и 3
    """
    require_prime(p)
    mats = pattern_elements(n, p, u1_pattern(n))
    ensure_budget("max_table_order", mats.shape[0])
    flat = mats.reshape(mats.shape[0], -1)
    gens = []
    for i, j in b_positions(n):
        g = identity_matrix(n)
        g[i, j] = 1
        gens.append(int(np.flatnonzero((flat == g.reshape(-1)).all(axis=1))[0]))
    return _table_group(mats, p, gens, f"U1({n},{p})"), mats


def small_two_groups(max_order: int = 8) -> List[FiniteGroup]:
    """2-группы порядка <= max_order (все группы порядка 2, 4, 8)"""
    groups = [cyclic(2), cyclic(4), elementary_abelian(2, 2), cyclic(8),
              direct_product(cyclic(4), cyclic(2)), elementary_abelian(2, 3), dihedral(4), quaternion()]
    return [g for g in groups if g.order <= max_order]


def named_group(spec: Dict[str, Any], path: str = "group") -> FiniteGroup:
    """
    Группа по описанию из файла задачи

    Параметры:
    - spec: {"type": "cyclic", "n": 4}, {"type": "product", "factors": [...]},
      {"type": "dihedral", "n": 4}, {"type": "quaternion"},
      {"type": "elementary_abelian", "p": 2, "rank": 2}, {"type": "u1", "n": 3, "p": 2},
      {"type": "matrices", "modulus": m, "generators": [...]},
      {"type": "table", "table": [[...]], "generators": [...]}
    - path: путь в JSON для сообщений об ошибках
    """
    kind = spec.get("type")
    try:
        if kind == "cyclic":
            return cyclic(int(spec["n"]))
        if kind == "dihedral":
            return dihedral(int(spec["n"]))
        if kind == "quaternion":
            return quaternion()
        if kind == "elementary_abelian":
            return elementary_abelian(int(spec["p"]), int(spec["rank"]))
        if kind == "product":
            factors = [named_group(f, f"{path}.factors[{i}]") for i, f in enumerate(spec["factors"])]
            if not factors:
                raise InputError("пустой список сомножителей", path=path)
            group = factors[0]
            for factor in factors[1:]:
                group = direct_product(group, factor)
            return group
        if kind == "u1":
            return unitriangular_u1(int(spec["n"]), int(spec["p"]))[0]
        if kind == "matrices":
            return from_matrices([np.array(g) for g in spec["generators"]], int(spec["modulus"]))[0]
        if kind == "table":
            return FiniteGroup(spec["table"], generators=spec.get("generators"), labels=spec.get("labels"))
    except KeyError as exc:
        raise InputError(f"нет обязательного поля {exc.args[0]}", path=path) from exc
    except InputError as exc:
        if exc.path:
            raise
        raise InputError(str(exc), path=path) from exc
    raise InputError(f"неизвестный тип группы {kind!r}", path=f"{path}.type")
