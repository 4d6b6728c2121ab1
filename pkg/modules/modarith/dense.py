"""
Модуль плотных матриц над Z/m
Отвечает за умножение, приведение к ступенчатому виду и решение систем над F_p
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from modules.modarith.residue import require_modulus, require_prime, unit_inverse
from utils.errors import InputError

logger = logging.getLogger(__name__)

INT64_LIMIT = 2 ** 63 - 1


def as_array(entries, modulus: int) -> np.ndarray:
    """Приведение к массиву int64 с вычетами в [0, modulus)"""
    arr = np.array(entries, dtype=np.int64)
    return np.mod(arr, modulus)


class DenseMat:
    """
    Плотная матрица над Z/m

    Данные хранятся в неизменяемом массиве int64 (rows x cols),
    все элементы приведены по модулю.
    """

    def __init__(self, data, modulus: int):
        self.modulus = require_modulus(modulus)
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise InputError(f"ожидалась двумерная матрица, получено измерение {arr.ndim}")
        arr = np.mod(arr, self.modulus)
        arr.setflags(write=False)
        self.data = arr

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "DenseMat":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @classmethod
    def identity(cls, size: int, modulus: int) -> "DenseMat":
        return cls(np.eye(size, dtype=np.int64), modulus)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Sequence[int], modulus: int) -> "DenseMat":
        """Построение по построчному списку элементов"""
        if len(entries) != rows * cols:
            raise InputError(f"число элементов {len(entries)} не равно {rows}*{cols}")
        return cls(np.array(entries, dtype=np.int64).reshape(rows, cols), modulus)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    def entries(self) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.data.reshape(-1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseMat):
            return NotImplemented
        return self.modulus == other.modulus and self.data.shape == other.data.shape \
            and bool(np.array_equal(self.data, other.data))

    def __repr__(self) -> str:
        return f"DenseMat({self.rows}x{self.cols} mod {self.modulus})"


def matmul_mod(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    """
    Точное произведение массивов по модулю без переполнения int64

    Внутреннее измерение разбивается на блоки так, чтобы частичные суммы
    помещались в int64.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if modulus == 1:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    inner = a.shape[1]
    bound = (modulus - 1) ** 2
    chunk = max(1, INT64_LIMIT // max(bound, 1))
    if inner <= chunk:
        return np.mod(a @ b, modulus)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for start in range(0, inner, chunk):
        stop = min(inner, start + chunk)
        out = np.mod(out + np.mod(a[:, start:stop] @ b[start:stop, :], modulus), modulus)
    return out


def mat_mul(a: DenseMat, b: DenseMat) -> DenseMat:
    """
    Произведение матриц над Z/m

    Параметры:
    - a, b: матрицы с одинаковым модулем, a.cols == b.rows

    Возвращает:
    - DenseMat: a·b
    """
    if a.modulus != b.modulus:
        raise InputError(f"разные модули {a.modulus} и {b.modulus}")
    if a.cols != b.rows:
        raise InputError(f"несогласованные размеры {a.rows}x{a.cols} и {b.rows}x{b.cols}")
    return DenseMat(matmul_mod(a.data, b.data, a.modulus), a.modulus)


def mat_vec(a: DenseMat, v: Sequence[int]) -> Tuple[int, ...]:
    """Произведение матрицы на вектор-столбец"""
    vec = as_array(v, a.modulus).reshape(-1, 1)
    if vec.shape[0] != a.cols:
        raise InputError(f"длина вектора {vec.shape[0]} не равна числу столбцов {a.cols}")
    return tuple(int(x) for x in matmul_mod(a.data, vec, a.modulus).reshape(-1))


@dataclass
class RrefResult:
    """Результат приведения к приведённому ступенчатому виду над F_p"""

    rank: int
    kernel_basis: List[Tuple[int, ...]]
    pivots: List[int]
    reduced: np.ndarray = field(repr=False)


def rref_array(mat: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    Приведённый ступенчатый вид массива над F_p

    Ведущий столбец выбирается слева направо, ведущая строка - первая
    ненулевая строка с наименьшим индексом.

    Возвращает:
    - (ненулевые строки rref, список ведущих столбцов)
    """
    m = np.mod(np.array(mat, dtype=np.int64), p)
    if m.ndim != 2:
        raise InputError("ожидалась двумерная матрица")
    rows, cols = m.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = unit_inverse(int(m[r, c]), p)
        m[r] = np.mod(m[r] * inv, p)
        column = m[:, c].copy()
        column[r] = 0
        others = np.flatnonzero(column)
        if others.size:
            m[others] = np.mod(m[others] - np.outer(column[others], m[r]), p)
        pivots.append(c)
        r += 1
    return m[:r], pivots


def kernel_from_rref(reduced: np.ndarray, pivots: List[int], cols: int, p: int) -> List[Tuple[int, ...]]:
    """Базис ядра: по одному вектору на каждый свободный столбец"""
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = np.zeros(cols, dtype=np.int64)
        v[free] = 1
        for i, c in enumerate(pivots):
            v[c] = (-int(reduced[i, free])) % p
        basis.append(tuple(int(x) for x in v))
    return basis


def rref_fp(a: DenseMat, p: Optional[int] = None) -> RrefResult:
    """
    Ранг, базис ядра и ведущие столбцы матрицы над F_p

    Параметры:
    - a: матрица над F_p
    - p: простой модуль (по умолчанию модуль матрицы)

    Возвращает:
    - RrefResult: rank + dim ker = cols
    """
    p = a.modulus if p is None else p
    if p != a.modulus:
        raise InputError(f"модуль матрицы {a.modulus} не равен {p}")
    require_prime(p)
    reduced, pivots = rref_array(a.data, p)
    kernel = kernel_from_rref(reduced, pivots, a.cols, p)
    return RrefResult(rank=len(pivots), kernel_basis=kernel, pivots=pivots, reduced=reduced)


def rank_fp(mat: np.ndarray, p: int) -> int:
    """Ранг массива над F_p"""
    if np.asarray(mat).size == 0:
        return 0
    return len(rref_array(mat, p)[1])


@dataclass
class SolveResult:
    """Результат решения линейной системы a·x = b"""

    consistent: bool
    solution: Optional[Tuple[int, ...]]
    kernel_basis: List[Tuple[int, ...]]


def solve_fp(a: DenseMat, b: Sequence[int], p: Optional[int] = None) -> SolveResult:
    """
    Решение системы a·x = b над F_p

    Параметры:
    - a: матрица системы
    - b: правая часть (длины a.rows)
    - p: простой модуль

    Возвращает:
    - SolveResult: частное решение и базис ядра, либо consistent=False
    """
    p = a.modulus if p is None else p
    require_prime(p)
    rhs = as_array(b, p).reshape(-1)
    if rhs.shape[0] != a.rows:
        raise InputError(f"длина правой части {rhs.shape[0]} не равна числу строк {a.rows}")
    aug = np.concatenate([a.data.reshape(a.rows, a.cols), rhs.reshape(-1, 1)], axis=1)
    reduced, pivots = rref_array(aug, p)
    cols = a.cols
    a_pivots = [c for c in pivots if c < cols]
    kernel = kernel_from_rref(reduced[:len(a_pivots), :cols], a_pivots, cols, p)
    if cols in pivots:
        return SolveResult(consistent=False, solution=None, kernel_basis=kernel)
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(a_pivots):
        x[c] = reduced[i, cols]
    return SolveResult(consistent=True, solution=tuple(int(v) for v in x), kernel_basis=kernel)


def solve_array_fp(mat: np.ndarray, rhs: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Частное решение для массивов numpy или None, если система несовместна"""
    mat = np.asarray(mat, dtype=np.int64)
    if mat.shape[1] == 0:
        return np.zeros(0, dtype=np.int64) if not np.mod(rhs, p).any() else None
    aug = np.concatenate([np.mod(mat, p), np.mod(np.asarray(rhs, dtype=np.int64).reshape(-1, 1), p)], axis=1)
    reduced, pivots = rref_array(aug, p)
    cols = mat.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = reduced[i, cols]
    return x


class RowReducer:
    """
    Подпространство F_p^d в приведённом ступенчатом виде

    Используется для канонических представителей смежных классов
    (остаток по модулю подпространства) и жадного дополнения базиса.
    """

    def __init__(self, dim: int, p: int, vectors: Optional[np.ndarray] = None):
        self.dim = dim
        self.p = p
        self.rows = np.zeros((0, dim), dtype=np.int64)
        self.pivots: List[int] = []
        if vectors is not None and len(vectors):
            self.rows, self.pivots = rref_array(np.asarray(vectors).reshape(-1, dim), p)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v) -> np.ndarray:
        """Остаток вектора по модулю подпространства (канонический)"""
        v = np.mod(np.array(v, dtype=np.int64).reshape(-1), self.p)
        for i, c in enumerate(self.pivots):
            if v[c]:
                v = np.mod(v - v[c] * self.rows[i], self.p)
        return v

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def add(self, v) -> bool:
        """Добавление вектора; True, если ранг вырос"""
        r = self.reduce(v)
        if not r.any():
            return False
        stacked = np.concatenate([self.rows, r.reshape(1, -1)], axis=0)
        self.rows, self.pivots = rref_array(stacked, self.p)
        return True


def kernel_array(mat: np.ndarray, p: int) -> np.ndarray:
    """Базис ядра массива над F_p (строки результата)"""
    mat = np.asarray(mat, dtype=np.int64)
    cols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    reduced, pivots = rref_array(mat, p)
    basis = kernel_from_rref(reduced, pivots, cols, p)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def span_elements(basis: np.ndarray, p: int) -> np.ndarray:
    """Все элементы линейной оболочки строк basis над F_p"""
    basis = np.asarray(basis, dtype=np.int64)
    k = basis.shape[0]
    coeffs = np.indices((p,) * k).reshape(k, -1).T if k else np.zeros((1, 0), dtype=np.int64)
    return np.mod(coeffs @ basis, p)
