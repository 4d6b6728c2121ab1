"""
Модуль унитреугольной группы U над Z/m
Отвечает за элементы U, ряд U^m, факторы A = U/U¹ и B = U¹/U³, инволюцию τ
и действие A на B
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from modules.modarith.dense import matmul_mod
from modules.modarith.residue import require_modulus, require_prime
from utils.errors import ConsistencyError, InputError

logger = logging.getLogger(__name__)

Position = Tuple[int, int]


@lru_cache(maxsize=None)
def positions(n: int, min_length: int = 1, max_length: int = None) -> Tuple[Position, ...]:
    """Позиции (i, j) над диагональю в диагональном порядке: сначала (i, i+1), затем (i, i+2), ..."""
    top = n if max_length is None else min(n, max_length)
    return tuple((i, i + d) for d in range(min_length, top + 1) for i in range(0, n - d + 1))


@lru_cache(maxsize=None)
def b_positions(n: int) -> Tuple[Position, ...]:
    """Базис B: все (i, i+2), затем все (i, i+3)"""
    return positions(n, 2, 3)


@lru_cache(maxsize=None)
def b0_positions(n: int) -> Tuple[Position, ...]:
    """Позиции B_0: ē_{0,2}, ē_{0,3}, ē_{n-3,n}, ē_{n-2,n} без повторов, в порядке базиса B"""
    wanted = {(0, 2), (0, 3), (n - 3, n), (n - 2, n)}
    return tuple(pos for pos in b_positions(n) if pos in wanted)


def _check_shape(n: int, m: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise InputError(f"n должно быть натуральным, получено {n!r}")
    require_modulus(m)


def identity_matrix(n: int) -> np.ndarray:
    return np.eye(n + 1, dtype=np.int64)


def unipotent_inverse(mat: np.ndarray, m: int) -> np.ndarray:
    """Обратная к унипотентной матрице: сумма (-N)^k"""
    size = mat.shape[0]
    eye = np.eye(size, dtype=np.int64)
    neg = np.mod(eye - mat, m)
    result = eye.copy()
    term = eye.copy()
    for _ in range(size - 1):
        term = matmul_mod(term, neg, m)
        if not term.any():
            break
        result = np.mod(result + term, m)
    return result


@dataclass(frozen=True)
class UniTri:
    """
    Элемент унитреугольной группы размера (n+1) над Z/m

    entries - вычеты над диагональю в диагональном порядке positions(n).
    """

    n: int
    modulus: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        _check_shape(self.n, self.modulus)
        expected = self.n * (self.n + 1) // 2
        if len(self.entries) != expected:
            raise InputError(f"ожидалось {expected} элементов, получено {len(self.entries)}")
        object.__setattr__(self, "entries", tuple(int(v) % self.modulus for v in self.entries))

    @classmethod
    def identity(cls, n: int, m: int) -> "UniTri":
        return cls(n, m, (0,) * (n * (n + 1) // 2))

    @classmethod
    def from_matrix(cls, mat, m: int) -> "UniTri":
        """Построение по матрице; диагональ должна быть единичной, нижняя часть - нулевой"""
        arr = np.mod(np.asarray(mat, dtype=np.int64), m)
        size = arr.shape[0]
        if arr.shape != (size, size) or size < 2:
            raise InputError(f"ожидалась квадратная матрица, получено {arr.shape}")
        if not np.array_equal(np.tril(arr), np.eye(size, dtype=np.int64) % m):
            raise InputError("матрица не унитреугольная")
        n = size - 1
        return cls(n, m, tuple(int(arr[i, j]) for i, j in positions(n)))

    @classmethod
    def from_dict(cls, n: int, m: int, values: Dict[Position, int]) -> "UniTri":
        index = {pos: t for t, pos in enumerate(positions(n))}
        entries = [0] * len(index)
        for pos, v in values.items():
            if pos not in index:
                raise InputError(f"позиция {pos} вне диапазона при n={n}")
            entries[index[pos]] = v
        return cls(n, m, tuple(entries))

    def to_matrix(self) -> np.ndarray:
        mat = identity_matrix(self.n)
        for (i, j), v in zip(positions(self.n), self.entries):
            mat[i, j] = v
        return mat

    def entry(self, i: int, j: int) -> int:
        if i == j:
            return 1 % self.modulus
        if not 0 <= i < j <= self.n:
            return 0
        d = j - i
        offset = sum(self.n - t + 1 for t in range(1, d))
        return self.entries[offset + i]

    def is_identity(self) -> bool:
        return not any(self.entries)

    def __mul__(self, other: "UniTri") -> "UniTri":
        return mul(self, other)


def _same_group(x: UniTri, y: UniTri) -> None:
    if (x.n, x.modulus) != (y.n, y.modulus):
        raise InputError(f"элементы разных групп: (n={x.n}, m={x.modulus}) и (n={y.n}, m={y.modulus})")


def elem_gen(n: int, m: int, i: int, j: int, c: int = 1) -> UniTri:
    """
    Элементарная матрица e_{i,j}^c

    Параметры:
    - n, m: размер (n+1) и модуль
    - i, j: позиция, 0 <= i < j <= n
    - c: показатель (вычет по модулю m)

    Возвращает:
    - UniTri с единственным ненулевым элементом c в позиции (i, j)
    """
    _check_shape(n, m)
    if not 0 <= i < j <= n:
        raise InputError(f"позиция ({i}, {j}) вне диапазона при n={n}")
    return UniTri.from_dict(n, m, {(i, j): c})


def mul(x: UniTri, y: UniTri) -> UniTri:
    """Произведение в группе U"""
    _same_group(x, y)
    return UniTri.from_matrix(matmul_mod(x.to_matrix(), y.to_matrix(), x.modulus), x.modulus)


def inv(x: UniTri) -> UniTri:
    """Обратный элемент"""
    return UniTri.from_matrix(unipotent_inverse(x.to_matrix(), x.modulus), x.modulus)


def commutator(x: UniTri, y: UniTri) -> UniTri:
    """Коммутатор [x, y] = x y x^{-1} y^{-1}"""
    return mul(mul(x, y), mul(inv(x), inv(y)))


def power(x: UniTri, k: int) -> UniTri:
    """Степень x^k (k может быть отрицательным)"""
    base = x if k >= 0 else inv(x)
    k = abs(k)
    result = UniTri.identity(x.n, x.modulus)
    while k:
        if k & 1:
            result = mul(result, base)
        base = mul(base, base)
        k >>= 1
    return result


def lcs_level(x: UniTri) -> int:
    """
    Уровень в нижнем центральном ряду: наибольшее m с x ∈ U^m

    U^m состоит из матриц с нулевыми первыми m побочными диагоналями;
    для единицы возвращается n.
    """
    require_prime(x.modulus)
    for (i, j), v in zip(positions(x.n), x.entries):
        if v:
            return j - i - 1
    return x.n


@dataclass(frozen=True)
class AVec:
    """Элемент A = U/U¹ в базисе ē_{i,i+1}"""

    p: int
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(v) % self.p for v in self.coeffs))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: "AVec") -> "AVec":
        return AVec(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "AVec":
        return AVec(self.p, tuple(-a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class BVec:
    """Элемент B = U¹/U³ в базисе ē_{i,j}, 2 <= j-i <= 3 (порядок b_positions)"""

    n: int
    p: int
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(b_positions(self.n)):
            raise InputError(f"ожидалось {len(b_positions(self.n))} координат B при n={self.n}")
        object.__setattr__(self, "coeffs", tuple(int(v) % self.p for v in self.coeffs))

    @classmethod
    def from_dict(cls, n: int, p: int, values: Dict[Position, int]) -> "BVec":
        index = {pos: t for t, pos in enumerate(b_positions(n))}
        coeffs = [0] * len(index)
        for pos, v in values.items():
            if pos not in index:
                raise InputError(f"позиция {pos} не входит в базис B")
            coeffs[index[pos]] = v
        return cls(n, p, tuple(coeffs))

    def as_dict(self) -> Dict[Position, int]:
        return {pos: v for pos, v in zip(b_positions(self.n), self.coeffs) if v}

    def __add__(self, other: "BVec") -> "BVec":
        return BVec(self.n, self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))


def to_A(x: UniTri) -> AVec:
    """Образ в A: первая побочная диагональ"""
    return AVec(x.modulus, x.entries[:x.n])


def to_B(x: UniTri) -> BVec:
    """Образ в B: вторая и третья побочные диагонали (x должен лежать в U¹)"""
    if any(x.entries[:x.n]):
        raise InputError("to_B определено только на U¹")
    return BVec(x.n, x.modulus, tuple(x.entry(i, j) for i, j in b_positions(x.n)))


def lift_A(s: AVec) -> UniTri:
    """Подъём S элемента A: первая побочная диагональ a, остальное нули"""
    n = s.n
    return UniTri.from_dict(n, s.p, {(i, i + 1): a for i, a in enumerate(s.coeffs)})


def tau(x: UniTri) -> UniTri:
    """Инволюция τ(x)_{i,j} = (x^{-1})_{n-j,n-i}"""
    n = x.n
    xi = unipotent_inverse(x.to_matrix(), x.modulus)
    return UniTri.from_dict(n, x.modulus, {(i, j): int(xi[n - j, n - i]) for i, j in positions(n)})


def tau_A(s: AVec) -> AVec:
    """Индуцированная инволюция на A: ē_{i,i+1} -> -ē_{n-i-1,n-i}"""
    n = s.n
    return AVec(s.p, tuple(-s.coeffs[n - 1 - t] for t in range(n)))


def tau_B(b: BVec) -> BVec:
    """Индуцированная инволюция на B: ē_{i,j} -> -ē_{n-j,n-i}"""
    n = b.n
    values = {(n - j, n - i): -v for (i, j), v in b.as_dict().items()}
    return BVec.from_dict(n, b.p, values)


def _generator_nilpotent(n: int, i: int, p: int) -> np.ndarray:
    """Матрица N_i на B: ē_{i+1,l} -> ē_{i,l}, ē_{k,i} -> -ē_{k,i+1} (вне B - ноль)"""
    basis = b_positions(n)
    index = {pos: t for t, pos in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)), dtype=np.int64)
    for t, (k, l) in enumerate(basis):
        if k == i + 1 and (i, l) in index:
            mat[index[(i, l)], t] += 1
        if l == i and (k, i + 1) in index:
            mat[index[(k, i + 1)], t] -= 1
    return np.mod(mat, p)


def b_action_matrix(s: AVec, method: str = "conjugation") -> np.ndarray:
    """
    Матрица действия s ∈ A на B (столбцы - образы базисных векторов)

    Параметры:
    - s: элемент A
    - method: "conjugation" (сопряжение подъёмом S) или
      "generators" (композиция действий ē_{i,i+1} по возрастанию i)
    """
    n, p = s.n, s.p
    basis = b_positions(n)
    size = len(basis)
    if method == "generators":
        mat = np.eye(size, dtype=np.int64)
        for i, a in enumerate(s.coeffs):
            if a:
                step = np.mod(np.eye(size, dtype=np.int64) + a * _generator_nilpotent(n, i, p), p)
                mat = matmul_mod(step, mat, p)
        return mat
    if method != "conjugation":
        raise InputError(f"неизвестный метод {method!r}")
    smat = lift_A(s).to_matrix()
    sinv = unipotent_inverse(smat, p)
    cols = []
    for pos in basis:
        q = identity_matrix(n)
        q[pos] = 1
        image = matmul_mod(matmul_mod(smat, q, p), sinv, p)
        cols.append([int(image[i, j]) for i, j in basis])
    return np.array(cols, dtype=np.int64).T.reshape(size, size)


def a_act_on_B(s: AVec, b: BVec) -> BVec:
    """
    Действие s ∈ A на b ∈ B (сопряжение подъёмом S, нормативное определение)

    Возвращает:
    - BVec: образ s·b
    """
    if s.n != b.n or s.p != b.p:
        raise InputError(f"несогласованные формы: A(n={s.n}, p={s.p}), B(n={b.n}, p={b.p})")
    mat = b_action_matrix(s, "conjugation")
    image = matmul_mod(mat, np.array(b.coeffs, dtype=np.int64).reshape(-1, 1), s.p).reshape(-1)
    return BVec(b.n, b.p, tuple(int(v) for v in image))


def check_b_action_methods(s: AVec) -> None:
    """Сравнение двух определений действия на B; ConsistencyError при расхождении"""
    conj = b_action_matrix(s, "conjugation")
    gens = b_action_matrix(s, "generators")
    if not np.array_equal(conj, gens):
        raise ConsistencyError("действие A на B: сопряжение и композиция генераторов расходятся",
                               witness={"s": list(s.coeffs)})


def all_avecs(n: int, p: int) -> List[AVec]:
    """Все элементы A в лексикографическом порядке"""
    grid = np.indices((p,) * n).reshape(n, -1).T if n else np.zeros((1, 0), dtype=np.int64)
    return [AVec(p, tuple(int(v) for v in row)) for row in grid]


def random_unitri(n: int, m: int, rng: np.random.Generator) -> UniTri:
    return UniTri(n, m, tuple(int(v) for v in rng.integers(0, m, size=n * (n + 1) // 2)))


def elementary_generators(n: int, m: int) -> List[UniTri]:
    """Порождающие U: e_{i,i+1}"""
    return [elem_gen(n, m, i, i + 1) for i in range(n)]


def matrix_of(values: Dict[Position, int], n: int) -> np.ndarray:
    """Унитреугольная матрица с заданными элементами"""
    mat = identity_matrix(n)
    for pos, v in values.items():
        mat[pos] = v
    return mat


def as_avec(coeffs: Sequence[int], p: int) -> AVec:
    return AVec(p, tuple(coeffs))


def batch_matmul(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Поэлементное произведение стопок матриц (..., k, k) по модулю m"""
    return np.mod(np.matmul(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)), m)


def batch_unipotent_inverse(mats: np.ndarray, m: int) -> np.ndarray:
    """Обратные к стопке унипотентных матриц"""
    mats = np.asarray(mats, dtype=np.int64)
    size = mats.shape[-1]
    eye = np.eye(size, dtype=np.int64)
    neg = np.mod(eye - mats, m)
    result = np.broadcast_to(eye, mats.shape).copy()
    term = result.copy()
    for _ in range(size - 1):
        term = batch_matmul(term, neg, m)
        result = np.mod(result + term, m)
    return result


def batch_power(mats: np.ndarray, k: int, m: int) -> np.ndarray:
    """Степень x^k для стопки матриц (k >= 0), возведение в квадрат и умножение"""
    mats = np.asarray(mats, dtype=np.int64)
    size = mats.shape[-1]
    result = np.broadcast_to(np.eye(size, dtype=np.int64), mats.shape).copy()
    base = mats.copy()
    while k:
        if k & 1:
            result = batch_matmul(result, base, m)
        base = batch_matmul(base, base, m)
        k >>= 1
    return result
