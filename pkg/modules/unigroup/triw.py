"""
Модуль обобщённых треугольных групп T(W)
Отвечает за T(W), U(W), U¹(W), Z(W) и A(W) для циклических N_i = Z/m,
расщеплённую точную последовательность для A(W) и диаграмму при (n, m) = (3, 8)
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from sympy.ntheory import totient

from config.settings import SCAN_CONFIG
from modules.modarith.dense import matmul_mod
from modules.modarith.residue import is_unit, require_modulus
from modules.unigroup.pattern import MatrixQuotient, in_pattern, make_pattern, pattern_elements, tri_inverse, u1_pattern
from modules.unigroup.unitri import UniTri, inv, positions
from utils.errors import InputError, UnsupportedError
from utils.helpers import check_record, ensure_budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TriW:
    """Элемент T(W): обратимая диагональ и элементы над диагональю (позиции positions(n))"""

    n: int
    modulus: int
    diag: Tuple[int, ...]
    entries: Tuple[int, ...]

    def __post_init__(self):
        m = self.modulus
        if len(self.diag) != self.n + 1 or len(self.entries) != self.n * (self.n + 1) // 2:
            raise InputError(f"несогласованная длина диагонали или элементов при n={self.n}")
        object.__setattr__(self, "diag", tuple(int(d) % m for d in self.diag))
        object.__setattr__(self, "entries", tuple(int(v) % m for v in self.entries))
        bad = [d for d in self.diag if not is_unit(d, m)]
        if bad:
            raise InputError(f"элементы диагонали {bad} не обратимы по модулю {m}")

    @classmethod
    def from_matrix(cls, mat, m: int) -> "TriW":
        arr = np.mod(np.asarray(mat, dtype=np.int64), m)
        if np.tril(arr, -1).any():
            raise InputError("матрица не верхнетреугольная")
        n = arr.shape[0] - 1
        return cls(n, m, tuple(int(d) for d in np.diag(arr)), tuple(int(arr[i, j]) for i, j in positions(n)))

    def to_matrix(self) -> np.ndarray:
        mat = np.diag(np.array(self.diag, dtype=np.int64))
        for (i, j), v in zip(positions(self.n), self.entries):
            mat[i, j] = v
        return mat


def _unit_closure(gens: Sequence[int], m: int) -> FrozenSet[int]:
    group = {1 % m}
    frontier = [1 % m]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = (x * g) % m
                if y not in group:
                    group.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(group)


class TriWGroup:
    """
    Контекст группы T(W) для W с факторами N_0, ..., N_n ≅ Z/m

    Параметры:
    - n, m: размер и модуль
    - diag_units: допустимые элементы Aut(N_i) по индексам (подгруппы (Z/m)*)
    """

    def __init__(self, n: int, m: int, diag_units: Sequence[FrozenSet[int]]):
        self.n = n
        self.m = m
        self.diag_units = tuple(diag_units)
        self.size = n + 1
        self.a_quotient = MatrixQuotient(n, m, u1_pattern(n))
        self.z_quotient = MatrixQuotient(n, m, {(0, n)})

    def identity(self) -> np.ndarray:
        return np.eye(self.size, dtype=np.int64)

    def is_element(self, x: np.ndarray) -> bool:
        x = np.asarray(x)
        if x.shape != (self.size, self.size) or np.tril(x, -1).any():
            return False
        return all(int(d) % self.m in units for d, units in zip(np.diag(x), self.diag_units))

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return matmul_mod(x, y, self.m)

    def inv(self, x: np.ndarray) -> np.ndarray:
        return tri_inverse(x, self.m)

    def rho(self, x: np.ndarray) -> Tuple[int, ...]:
        """Действие на факторах N_i: диагональ"""
        return tuple(int(d) % self.m for d in np.diag(x))

    def in_U(self, x: np.ndarray) -> bool:
        return all(d == 1 % self.m for d in self.rho(x))

    def in_U1(self, x: np.ndarray) -> bool:
        return self.in_U(x) and not np.diag(np.asarray(x), 1).any()

    def in_Z(self, x: np.ndarray) -> bool:
        return in_pattern(np.mod(x, self.m), {(0, self.n)})

    def section(self, diag: Sequence[int]) -> np.ndarray:
        """Сечение ∏ Aut(N_i) -> A(W): d -> diag(d)"""
        return np.diag(np.array(diag, dtype=np.int64) % self.m)

    def to_AW(self, x: np.ndarray) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """Образ в A(W) = T(W)/U¹(W): (диагональ, первая побочная диагональ нормальной формы)"""
        y = self.a_quotient.normalize(x)
        return self.rho(y), tuple(int(v) for v in np.diag(y, 1))

    def unipotent(self, superdiag: Sequence[int]) -> np.ndarray:
        mat = self.identity()
        for i, c in enumerate(superdiag):
            mat[i, i + 1] = int(c) % self.m
        return mat

    def random_element(self, rng: np.random.Generator, unipotent: bool = False) -> np.ndarray:
        mat = np.triu(rng.integers(0, self.m, size=(self.size, self.size)), 1).astype(np.int64)
        for i, units in enumerate(self.diag_units):
            mat[i, i] = 1 if unipotent else sorted(units)[int(rng.integers(0, len(units)))]
        return mat


def build_TW(n: int, m: int, diag_actions: Optional[Sequence] = None,
             ranks: Optional[Sequence[int]] = None) -> TriWGroup:
    """
    Построение T(W) и её подгрупп

    Параметры:
    - n, m: размер и модуль
    - diag_actions: по индексу i список порождающих подгруппы в (Z/m)*,
      действующей на N_i (None - вся группа единиц)
    - ranks: ранги N_i (поддерживается только 1)

    Возвращает:
    - TriWGroup
    """
    require_modulus(m)
    if n < 1:
        raise InputError(f"n должно быть натуральным, получено {n}")
    if ranks is not None and any(int(r) != 1 for r in ranks):
        raise UnsupportedError("поддерживаются только циклические N_i ранга 1")
    all_units = frozenset(u for u in range(m) if is_unit(u, m))
    if diag_actions is None:
        groups = [all_units] * (n + 1)
    else:
        if len(diag_actions) != n + 1:
            raise InputError(f"ожидалось {n + 1} наборов диагональных действий", path="diag_actions")
        groups = []
        for i, gens in enumerate(diag_actions):
            gens = [int(g) % m for g in (gens if isinstance(gens, (list, tuple)) else [gens])]
            bad = [g for g in gens if g not in all_units]
            if bad:
                raise InputError(f"элементы {bad} не обратимы по модулю {m}", path=f"diag_actions[{i}]")
            groups.append(_unit_closure(gens, m))
    logger.info(f"T(W): n={n}, m={m}, |(Z/m)*|={int(totient(m))}")
    return TriWGroup(n, m, groups)


def _sample_pairs(ctx: TriWGroup, count: int, rng: np.random.Generator, unipotent: bool = False):
    for _ in range(count):
        yield ctx.random_element(rng, unipotent), ctx.random_element(rng, unipotent)


def aw_split_check(ctx: TriWGroup, samples: Optional[int] = None, seed: Optional[int] = None) -> Dict:
    """
    Проверка расщеплённой последовательности 1 -> ⊕M_{i,i+1} -> A(W) -> ∏Aut(N_i) -> 1

    Также проверяет, что Z(W) нормальна в T(W) и центральна в U(W),
    а при (n, m) = (3, 8) - точность строк и расщепление столбцов диаграммы для U_{Z/8}.
    """
    samples = SCAN_CONFIG["split_sample_pairs"] if samples is None else samples
    rng = np.random.default_rng(SCAN_CONFIG["seed"] if seed is None else seed)
    m, n = ctx.m, ctx.n
    witness = {"projection": None, "kernel": None, "section": None, "exactness": None, "action": None}
    for x, y in _sample_pairs(ctx, samples, rng):
        dx, _ = ctx.to_AW(x)
        dy, _ = ctx.to_AW(y)
        dxy, _ = ctx.to_AW(ctx.mul(x, y))
        if witness["projection"] is None and dxy != tuple(a * b % m for a, b in zip(dx, dy)):
            witness["projection"] = {"x": x, "y": y}
        sec = ctx.section(dx)
        rest = ctx.mul(x, ctx.inv(sec))
        if witness["exactness"] is None and not ctx.in_U(rest):
            witness["exactness"] = {"x": x}
        if witness["section"] is None:
            if not np.array_equal(ctx.mul(ctx.section(dx), ctx.section(dy)), ctx.section(dxy)) or ctx.to_AW(sec)[0] != dx:
                witness["section"] = {"x": x, "y": y}
    for x, y in _sample_pairs(ctx, samples, rng, unipotent=True):
        _, ax = ctx.to_AW(x)
        _, ay = ctx.to_AW(y)
        dxy, axy = ctx.to_AW(ctx.mul(x, y))
        normal = ctx.a_quotient.normalize(x)
        if witness["kernel"] is None and (axy != tuple((a + b) % m for a, b in zip(ax, ay))
                                          or not np.array_equal(normal, ctx.unipotent(ax))):
            witness["kernel"] = {"x": x, "y": y}
    for _ in range(max(1, samples // 10)):
        d = ctx.rho(ctx.random_element(rng))
        c = [int(v) for v in rng.integers(0, m, size=n)]
        conj = ctx.mul(ctx.mul(ctx.section(d), ctx.unipotent(c)), ctx.inv(ctx.section(d)))
        expected = [(d[i] * c[i] * pow(d[i + 1], -1, m)) % m for i in range(n)]
        if witness["action"] is None and ctx.to_AW(conj)[1] != tuple(expected):
            witness["action"] = {"diag": d, "superdiag": c}
    checks = [
        check_record("projection_is_homomorphism", witness["projection"] is None, witness["projection"]),
        check_record("kernel_is_superdiagonal_sum", witness["kernel"] is None, witness["kernel"]),
        check_record("section_is_homomorphism", witness["section"] is None, witness["section"]),
        check_record("sequence_exact", witness["exactness"] is None, witness["exactness"]),
        check_record("diagonal_action_on_kernel", witness["action"] is None, witness["action"]),
    ]
    checks.extend(_centre_checks(ctx, samples, rng))
    report = {"n": n, "m": m, "checks": checks}
    if (n, m) == (3, 8):
        report["diagram"] = u8_diagram_check(m)
        checks.extend(report["diagram"]["checks"])
    report["passed"] = all(c["passed"] for c in checks)
    return report


def _centre_checks(ctx: TriWGroup, samples: int, rng: np.random.Generator) -> List[Dict]:
    m, n = ctx.m, ctx.n
    central = normal = None
    for _ in range(max(1, samples // 10)):
        c = int(rng.integers(1, m)) if m > 1 else 0
        z = ctx.identity()
        z[0, n] = c
        u = ctx.random_element(rng, unipotent=True)
        if central is None and not np.array_equal(ctx.mul(u, z), ctx.mul(z, u)):
            central = {"z": c, "u": u}
        t = ctx.random_element(rng)
        conj = ctx.mul(ctx.mul(t, z), ctx.inv(t))
        d = ctx.rho(t)
        if normal is None and (not ctx.in_Z(conj) or int(conj[0, n]) != d[0] * c * pow(d[n], -1, m) % m):
            normal = {"z": c, "t": t}
    return [check_record("centre_central_in_U", central is None, central),
            check_record("centre_normal_in_T", normal is None, normal)]


def _superdiag_batch(mats: np.ndarray) -> np.ndarray:
    return np.stack([mats[:, i, i + 1] for i in range(mats.shape[1] - 1)], axis=1)


def u8_diagram_check(m: int = 8) -> Dict:
    """
    Диаграмма для U_{Z/m} при n = 3

    Строки: U¹ -> P -> Z/m<ē_{1,2}>, U¹ -> U -> (Z/m)³;
    столбцы: P -> U -> Z/m<ē_{0,1}, ē_{2,3}> с сечением e_{0,1}^a e_{2,3}^b.
    """
    n = 3
    ensure_budget("max_elems", m ** 6)
    p_pattern = make_pattern(n, {(0, 2), (0, 3), (1, 2), (1, 3)})
    p_elems = pattern_elements(n, m, p_pattern)
    u1_elems = pattern_elements(n, m, u1_pattern(n))
    u_elems = pattern_elements(n, m, positions(n))
    p_keys = {x.tobytes() for x in p_elems}
    checks = []

    gens = []
    for pos in ((0, 2), (0, 3), (1, 2), (1, 3)):
        g = np.eye(n + 1, dtype=np.int64)
        g[pos] = 1
        gens.append(g)
    abelian = all(np.array_equal(matmul_mod(a, b, m), matmul_mod(b, a, m)) for a in gens for b in gens)
    checks.append(check_record("P_abelian", abelian))
    checks.append(check_record("P_contains_U1", all(x.tobytes() in p_keys for x in u1_elems),
                               {"order_P": len(p_elems), "order_U1": len(u1_elems)}))
    closed = all(matmul_mod(x, g, m).tobytes() in p_keys for x in p_elems[:: max(1, len(p_elems) // 256)] for g in gens)
    checks.append(check_record("P_closed", closed))

    # верхняя строка: U¹ -> P -> Z/m<ē_{1,2}>, отображение - элемент (1,2)
    rng = np.random.default_rng(SCAN_CONFIG["seed"])
    idx = rng.integers(0, len(p_elems), size=(SCAN_CONFIG["split_sample_pairs"], 2))
    prods = np.mod(np.matmul(p_elems[idx[:, 0]], p_elems[idx[:, 1]]), m)
    top_hom = np.array_equal(prods[:, 1, 2], np.mod(p_elems[idx[:, 0], 1, 2] + p_elems[idx[:, 1], 1, 2], m))
    top_kernel = p_elems[p_elems[:, 1, 2] == 0]
    top_exact = len(top_kernel) == len(u1_elems) and all(in_pattern(x, u1_pattern(n)) for x in top_kernel)
    top_onto = set(int(v) for v in p_elems[:, 1, 2]) == set(range(m))
    checks.append(check_record("top_row_exact", top_hom and top_exact and top_onto))

    # средняя строка: U¹ -> U -> (Z/m)³, отображение - первая побочная диагональ
    idx = rng.integers(0, len(u_elems), size=(SCAN_CONFIG["split_sample_pairs"], 2))
    prods = np.mod(np.matmul(u_elems[idx[:, 0]], u_elems[idx[:, 1]]), m)
    mid_hom = np.array_equal(_superdiag_batch(prods),
                             np.mod(_superdiag_batch(u_elems[idx[:, 0]]) + _superdiag_batch(u_elems[idx[:, 1]]), m))
    sd = _superdiag_batch(u_elems)
    mid_kernel = u_elems[~sd.any(axis=1)]
    mid_exact = len(mid_kernel) == len(u1_elems)
    checks.append(check_record("middle_row_exact", mid_hom and mid_exact))

    # средний столбец: P -> U -> U/P = Z/m<ē_{0,1}, ē_{2,3}>, координаты нормальной формы по модулю P
    quotient = MatrixQuotient(n, m, p_pattern)
    normal = quotient.normalize_batch(u_elems)
    col = np.stack([normal[:, 0, 1], normal[:, 2, 3]], axis=1)
    col_kernel = u_elems[~col.any(axis=1)]
    col_exact = len(col_kernel) == len(p_elems) and all(x.tobytes() in p_keys for x in col_kernel)
    col_prods = quotient.normalize_batch(prods)
    col_hom = np.array_equal(np.stack([col_prods[:, 0, 1], col_prods[:, 2, 3]], axis=1),
                             np.mod(col[idx[:, 0]] + col[idx[:, 1]], m))
    e01 = np.eye(n + 1, dtype=np.int64)
    e01[0, 1] = 1
    e23 = np.eye(n + 1, dtype=np.int64)
    e23[2, 3] = 1
    powers01 = [np.linalg.matrix_power(e01, a) % m for a in range(m)]
    powers23 = [np.linalg.matrix_power(e23, b) % m for b in range(m)]

    def section(a: int, b: int) -> np.ndarray:
        return matmul_mod(powers01[a % m], powers23[b % m], m)

    section_hom = True
    section_splits = True
    for a in range(m):
        for b in range(m):
            s = section(a, b)
            if (int(s[0, 1]), int(s[1, 2]), int(s[2, 3])) != (a, 0, b):
                section_splits = False
            for a2 in range(m):
                for b2 in range(m):
                    if not np.array_equal(matmul_mod(s, section(a2, b2), m), section(a + a2, b + b2)):
                        section_hom = False
                        break
                if not section_hom:
                    break
    checks.append(check_record("middle_column_exact", col_exact and col_hom))
    checks.append(check_record("middle_column_splits", section_hom and section_splits))

    # правый столбец: Z/m<ē_{1,2}> -> (Z/m)³ -> Z/m<ē_{0,1}, ē_{2,3}> на образах элементов U
    images = {tuple(int(v) for v in t) for t in sd}
    right = sd[:, [0, 2]]
    right_kernel = {tuple(int(v) for v in t) for t in sd[~right.any(axis=1)]}
    top_image = {(0, int(v), 0) for v in p_elems[:, 1, 2]}
    right_ok = len(images) == m ** 3 and right_kernel == top_image and section_splits
    checks.append(check_record("right_column_splits", right_ok,
                               {"image": len(images), "kernel": len(right_kernel)}))

    # квадраты: P -> Z/m<ē_{1,2}> -> (Z/m)³ совпадает с P -> U -> (Z/m)³,
    # U -> (Z/m)³ -> Z/m<ē_{0,1}, ē_{2,3}> совпадает с U -> U/P
    zeros = np.zeros(len(p_elems), dtype=np.int64)
    square_top = np.array_equal(_superdiag_batch(p_elems), np.stack([zeros, p_elems[:, 1, 2], zeros], axis=1))
    square_bottom = np.array_equal(right, col)
    checks.append(check_record("squares_commute", bool(square_top and square_bottom),
                               {"top": bool(square_top), "bottom": bool(square_bottom)}))
    return {"n": n, "m": m, "order_P": int(len(p_elems)), "order_U": int(len(u_elems)),
            "order_U1": int(len(u1_elems)), "checks": checks}


def degeneration_check(n: int, p: int, samples: Optional[int] = None) -> Dict:
    """
    Вырождение U(W) в U при простом m и тривиальной диагонали

    Сравнивает множество элементов и умножение с UniTri
    """
    ctx = build_TW(n, p, [[1]] * (n + 1))
    ensure_budget("max_elems", p ** (n * (n + 1) // 2))
    elems = pattern_elements(n, p, positions(n))
    same_set = all(ctx.is_element(x) and ctx.in_U(x) for x in elems)
    unitri_same = all(np.array_equal(UniTri.from_matrix(x, p).to_matrix(), x) for x in elems)
    samples = SCAN_CONFIG["split_sample_pairs"] if samples is None else samples
    rng = np.random.default_rng(SCAN_CONFIG["seed"])
    law = True
    for x, y in _sample_pairs(ctx, samples, rng, unipotent=True):
        a, b = UniTri.from_matrix(x, p), UniTri.from_matrix(y, p)
        if not np.array_equal((a * b).to_matrix(), ctx.mul(x, y)):
            law = False
            break
        if not np.array_equal(ctx.inv(x), inv(a).to_matrix()):
            law = False
            break
    u1_same = all(ctx.in_U1(x) == in_pattern(x, u1_pattern(n)) for x in elems)
    checks = [check_record("elements_coincide", same_set and unitri_same, {"order": len(elems)}),
              check_record("group_law_coincides", law),
              check_record("u1_coincides", u1_same)]
    return {"n": n, "p": p, "checks": checks, "passed": all(c["passed"] for c in checks)}
