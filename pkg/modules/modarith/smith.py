"""
Модуль нормальной формы Смита над Z/p^k
Отвечает за элементарные делители, ядра и решение систем над локальным кольцом
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from modules.modarith.dense import DenseMat, matmul_mod
from modules.modarith.residue import require_prime_power, unit_inverse
from utils.errors import InputError

logger = logging.getLogger(__name__)


@dataclass
class SmithForm:
    """
    Нормальная форма Смита L·a·R = D над Z/p^k

    divisors - ненулевые диагональные элементы p^{e_i} (e_i < k),
    right_inv - обратная к R матрица.
    """

    p: int
    k: int
    shape: Tuple[int, int]
    divisors: List[int]
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)
    right_inv: np.ndarray = field(repr=False)

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def exponents(self) -> List[int]:
        return [_exponent(d, self.p) for d in self.divisors]

    @property
    def kernel_size(self) -> int:
        """Число решений a·x = 0 в (Z/p^k)^cols"""
        size = 1
        for d in self.divisors:
            size *= d
        return size * self.modulus ** (self.shape[1] - self.rank)


def _exponent(d: int, p: int) -> int:
    e = 0
    while d % p == 0 and d > 1:
        d //= p
        e += 1
    return e


def _valuations(values: np.ndarray, p: int, k: int) -> np.ndarray:
    """Поэлементное p-нормирование (нулю соответствует k)"""
    val = np.zeros(values.shape, dtype=np.int64)
    power = 1
    for _ in range(k):
        power *= p
        val += (np.mod(values, power) == 0)
    return val


def smith_array(mat: np.ndarray, p: int, k: int) -> SmithForm:
    """
    Нормальная форма Смита массива над Z/p^k

    Ведущий элемент - элемент минимального нормирования
    (при равенстве: меньшая строка, затем меньший столбец);
    деление выполняется только на обратимые элементы.
    """
    q = p ** k
    a = np.mod(np.array(mat, dtype=np.int64), q)
    rows, cols = a.shape
    left = np.eye(rows, dtype=np.int64)
    right = np.eye(cols, dtype=np.int64)
    right_inv = np.eye(cols, dtype=np.int64)
    divisors: List[int] = []
    t = 0
    while t < min(rows, cols):
        sub = a[t:, t:]
        if not sub.any():
            break
        vals = _valuations(sub, p, k)
        flat = int(np.argmin(vals))
        i, j = t + flat // sub.shape[1], t + flat % sub.shape[1]
        e = int(vals.flat[flat])
        if i != t:
            a[[t, i]] = a[[i, t]]
            left[[t, i]] = left[[i, t]]
        if j != t:
            a[:, [t, j]] = a[:, [j, t]]
            right[:, [t, j]] = right[:, [j, t]]
            right_inv[[t, j]] = right_inv[[j, t]]
        pe = p ** e
        unit = int(a[t, t]) // pe
        uinv = unit_inverse(unit, q)
        a[t] = np.mod(a[t] * uinv, q)
        left[t] = np.mod(left[t] * uinv, q)
        # столбец t: все элементы делятся на p^e
        factors = a[:, t] // pe
        factors[t] = 0
        rows_nz = np.flatnonzero(factors)
        if rows_nz.size:
            a[rows_nz] = np.mod(a[rows_nz] - np.outer(factors[rows_nz], a[t]), q)
            left[rows_nz] = np.mod(left[rows_nz] - np.outer(factors[rows_nz], left[t]), q)
        # строка t: операции над столбцами
        factors = a[t] // pe
        factors[t] = 0
        cols_nz = np.flatnonzero(factors)
        if cols_nz.size:
            a[:, cols_nz] = np.mod(a[:, cols_nz] - np.outer(a[:, t], factors[cols_nz]), q)
            right[:, cols_nz] = np.mod(right[:, cols_nz] - np.outer(right[:, t], factors[cols_nz]), q)
            right_inv[t] = np.mod(right_inv[t] + matmul_mod(factors[cols_nz].reshape(1, -1), right_inv[cols_nz], q).reshape(-1), q)
        divisors.append(pe)
        t += 1
    return SmithForm(p=p, k=k, shape=(rows, cols), divisors=divisors,
                     left=left, right=right, right_inv=right_inv)


def smith_pk(a: DenseMat, p: int, k: int) -> SmithForm:
    """
    Элементарные делители матрицы над Z/p^k

    Параметры:
    - a: матрица с модулем p^k
    - p, k: простое и степень

    Возвращает:
    - SmithForm с делителями {p^{e_1}, ...}
    """
    pp, kk = require_prime_power(a.modulus)
    if (pp, kk) != (p, k):
        raise InputError(f"модуль матрицы {a.modulus} не равен {p}^{k}")
    return smith_array(a.data, p, k)


def solve_pk(mat: np.ndarray, rhs: Sequence[int], p: int, k: int,
             form: Optional[SmithForm] = None) -> Optional[np.ndarray]:
    """
    Частное решение mat·x = rhs над Z/p^k или None

    Параметры:
    - mat: массив rows x cols
    - rhs: правая часть
    - form: заранее посчитанная форма Смита (необязательно)
    """
    q = p ** k
    mat = np.mod(np.asarray(mat, dtype=np.int64), q)
    form = form or smith_array(mat, p, k)
    c = matmul_mod(form.left, np.mod(np.asarray(rhs, dtype=np.int64).reshape(-1, 1), q), q).reshape(-1)
    y = np.zeros(mat.shape[1], dtype=np.int64)
    for i, d in enumerate(form.divisors):
        if c[i] % d:
            return None
        y[i] = c[i] // d
    if c[form.rank:].any():
        return None
    return matmul_mod(form.right, y.reshape(-1, 1), q).reshape(-1)


def kernel_generators(mat: np.ndarray, p: int, k: int,
                      form: Optional[SmithForm] = None) -> List[Tuple[np.ndarray, int]]:
    """
    Порождающие ядра mat·x = 0 над Z/p^k вместе с их порядками

    Ядро является прямой суммой циклических подгрупп, порождённых
    возвращаемыми векторами.
    """
    q = p ** k
    mat = np.asarray(mat, dtype=np.int64)
    form = form or smith_array(mat, p, k)
    gens = []
    for i in range(mat.shape[1]):
        if i < form.rank:
            d = form.divisors[i]
            if d == 1:
                continue
            gens.append((np.mod(form.right[:, i] * (q // d), q), d))
        else:
            gens.append((form.right[:, i].copy(), q))
    return gens


@dataclass
class Cokernel:
    """
    Коядро (Z/p^k)^n / (строчное пространство relations)

    invariants - порядки циклических слагаемых, generators - их
    представители в исходных координатах, transform - матрица перехода
    к координатам слагаемых.
    """

    p: int
    k: int
    invariants: List[int]
    generators: List[np.ndarray]
    transform: np.ndarray = field(repr=False)
    positions: List[int] = field(repr=False, default_factory=list)

    def coordinates(self, v) -> Tuple[int, ...]:
        """Координаты класса вектора v в циклических слагаемых"""
        q = self.p ** self.k
        x = matmul_mod(np.mod(np.asarray(v, dtype=np.int64).reshape(1, -1), q), self.transform, q).reshape(-1)
        return tuple(int(x[pos]) % inv for pos, inv in zip(self.positions, self.invariants))


def cokernel(relations: np.ndarray, ncols: int, p: int, k: int) -> Cokernel:
    """
    Инвариантные множители коядра матрицы соотношений

    Параметры:
    - relations: соотношения (строки) в (Z/p^k)^ncols
    - ncols: размерность объемлющего модуля
    """
    q = p ** k
    rel = np.asarray(relations, dtype=np.int64).reshape(-1, ncols)
    form = smith_array(rel, p, k)
    invariants, generators, positions = [], [], []
    for j in range(ncols):
        order = form.divisors[j] if j < form.rank else q
        if order == 1:
            continue
        invariants.append(order)
        generators.append(np.mod(form.right_inv[j], q))
        positions.append(j)
    return Cokernel(p=p, k=k, invariants=invariants, generators=generators,
                    transform=form.right, positions=positions)
