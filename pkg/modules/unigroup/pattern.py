"""
Модуль подгрупп-шаблонов
Отвечает за нормальные подгруппы U и T(W), заданные замкнутыми вверх множествами позиций
(Z, U^m, U¹, P^{r,s}), и за нормальные формы элементов фактор-групп по ним
"""

import logging
from typing import FrozenSet, Iterable, List, Tuple

import numpy as np

from modules.modarith.dense import matmul_mod
from modules.modarith.residue import unit_inverse
from modules.unigroup.unitri import Position, positions
from utils.errors import InputError

logger = logging.getLogger(__name__)

Pattern = FrozenSet[Position]


def is_upward_closed(n: int, pattern: Iterable[Position]) -> bool:
    """(i, j) ∈ Π влечёт (i', j') ∈ Π при i' <= i, j' >= j"""
    pattern = set(pattern)
    for i, j in pattern:
        if i > 0 and (i - 1, j) not in pattern:
            return False
        if j < n and (i, j + 1) not in pattern:
            return False
    return True


def make_pattern(n: int, pattern: Iterable[Position]) -> Pattern:
    """Проверенный шаблон нормальной подгруппы"""
    result = frozenset((int(i), int(j)) for i, j in pattern)
    for i, j in result:
        if not 0 <= i < j <= n:
            raise InputError(f"позиция ({i}, {j}) вне диапазона при n={n}")
    if not is_upward_closed(n, result):
        raise InputError("множество позиций не замкнуто вверх и не задаёт нормальную подгруппу")
    return result


def centre_pattern(n: int) -> Pattern:
    """Z = <e_{0,n}>"""
    return frozenset({(0, n)})


def lcs_pattern(n: int, level: int) -> Pattern:
    """U^level: позиции длины >= level+1"""
    return frozenset(positions(n, level + 1)) if level + 1 <= n else frozenset()


def u1_pattern(n: int) -> Pattern:
    return lcs_pattern(n, 1)


def prs_pattern(n: int, r: int, s: int) -> Pattern:
    """P^{r,s}: {(i, n): i <= r} ∪ {(0, j): j >= n-s}"""
    return frozenset({(i, n) for i in range(r + 1)} | {(0, j) for j in range(n - s, n + 1)})


def ordered(pattern: Pattern) -> List[Position]:
    """Позиции шаблона по возрастанию длины"""
    return sorted(pattern, key=lambda pos: (pos[1] - pos[0], pos[0]))


def layers(pattern: Pattern, stop: Pattern = frozenset()) -> List[Tuple[int, Pattern, Pattern]]:
    """
    Фильтрация шаблона по длинам позиций

    Возвращает:
    - список (длина, hi, lo): hi ⊃ lo - соседние члены цепочки
      (Π ∩ {длина >= ℓ}) ∪ stop, слой hi \\ lo абелев
    """
    lengths = sorted({j - i for i, j in pattern - stop})
    chain = []
    for length in lengths:
        hi = frozenset(pos for pos in pattern if pos[1] - pos[0] >= length) | stop
        lo = frozenset(pos for pos in pattern if pos[1] - pos[0] > length) | stop
        chain.append((length, hi, lo))
    return chain


def tri_inverse(mat: np.ndarray, m: int) -> np.ndarray:
    """Обратная к верхнетреугольной матрице с обратимой диагональю: x = D(I+N)"""
    mat = np.mod(np.asarray(mat, dtype=np.int64), m)
    size = mat.shape[0]
    diag = np.diag(mat)
    dinv = np.array([unit_inverse(int(d), m) for d in diag], dtype=np.int64)
    unip = np.mod(dinv[:, None] * mat, m)
    eye = np.eye(size, dtype=np.int64)
    neg = np.mod(eye - unip, m)
    result = eye.copy()
    term = eye.copy()
    for _ in range(size - 1):
        term = matmul_mod(term, neg, m)
        if not term.any():
            break
        result = np.mod(result + term, m)
    return np.mod(result * dinv[None, :], m)


class MatrixQuotient:
    """
    Фактор-группа T/N по подгруппе-шаблону N

    Элементы - матрицы в нормальной форме: нули во всех позициях N.
    Нормальная форма получается умножением справа на e_{i,j}^{-c}
    в порядке возрастания длины позиций.
    """

    def __init__(self, n: int, m: int, pattern: Iterable[Position] = frozenset()):
        self.n = n
        self.m = m
        self.pattern = make_pattern(n, pattern)
        self.order = ordered(self.pattern)
        self._inverses = {}

    def _inv_unit(self, d: int) -> int:
        if d not in self._inverses:
            self._inverses[d] = unit_inverse(d, self.m)
        return self._inverses[d]

    def normalize(self, mat: np.ndarray) -> np.ndarray:
        x = np.mod(np.array(mat, dtype=np.int64), self.m)
        for i, j in self.order:
            c = int(x[i, j])
            if c:
                f = (c * self._inv_unit(int(x[i, i]))) % self.m
                x[:, j] = np.mod(x[:, j] - f * x[:, i], self.m)
        return x

    def normalize_batch(self, mats: np.ndarray) -> np.ndarray:
        """Нормальная форма для массива матриц (..., n+1, n+1) с единичной диагональю"""
        x = np.mod(np.array(mats, dtype=np.int64), self.m)
        for i, j in self.order:
            f = x[..., i, j].copy()
            x[..., :, j] = np.mod(x[..., :, j] - f[..., None] * x[..., :, i], self.m)
        return x

    def identity(self) -> np.ndarray:
        return np.eye(self.n + 1, dtype=np.int64)

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.normalize(matmul_mod(x, y, self.m))

    def inv(self, x: np.ndarray) -> np.ndarray:
        return self.normalize(tri_inverse(x, self.m))

    def conj(self, g: np.ndarray, x: np.ndarray) -> np.ndarray:
        """g x g^{-1}"""
        return self.mul(self.mul(g, x), self.inv(g))

    def key(self, x: np.ndarray) -> bytes:
        return np.ascontiguousarray(x, dtype=np.int64).tobytes()

    def equal(self, x: np.ndarray, y: np.ndarray) -> bool:
        return bool(np.array_equal(self.normalize(x), self.normalize(y)))

    def contains(self, x: np.ndarray) -> bool:
        """Лежит ли матрица в N (единичная в факторе)"""
        return bool(np.array_equal(self.normalize(x), self.identity()))


def pattern_elements(n: int, m: int, pattern: Iterable[Position]) -> np.ndarray:
    """Все элементы унипотентной подгруппы-шаблона (массив матриц)"""
    pos = ordered(frozenset(pattern))
    count = m ** len(pos)
    digits = np.indices((m,) * len(pos)).reshape(len(pos), -1).T if pos else np.zeros((1, 0), dtype=np.int64)
    mats = np.broadcast_to(np.eye(n + 1, dtype=np.int64), (count, n + 1, n + 1)).copy()
    for t, (i, j) in enumerate(pos):
        mats[:, i, j] = digits[:, t]
    return mats


def in_pattern(x: np.ndarray, pattern: Iterable[Position]) -> bool:
    """Носитель унипотентной матрицы содержится в шаблоне"""
    x = np.asarray(x)
    size = x.shape[0]
    if not np.array_equal(np.diag(x), np.ones(size, dtype=np.int64)):
        return False
    allowed = set(pattern)
    for i in range(size):
        for j in range(i + 1, size):
            if x[i, j] and (i, j) not in allowed:
                return False
    return True
