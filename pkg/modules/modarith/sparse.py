"""
Модуль разреженных матриц над F_p
Отвечает за ранг и ядро больших разреженных систем (матрицы кограниц бар-резольвенты)
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from modules.modarith.residue import require_modulus, require_prime, unit_inverse
from utils.errors import InputError
from utils.helpers import progress

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseMat:
    """Разреженная матрица: тройки (строка, столбец, ненулевой вычет) без повторов"""

    rows: int
    cols: int
    modulus: int
    triples: Tuple[Tuple[int, int, int], ...]

    @classmethod
    def from_triples(cls, rows: int, cols: int, triples: Iterable[Tuple[int, int, int]],
                     modulus: int) -> "SparseMat":
        """Проверка координат и повторов; нулевые значения отбрасываются"""
        require_modulus(modulus)
        seen = set()
        cleaned = []
        for r, c, v in triples:
            if not (0 <= r < rows and 0 <= c < cols):
                raise InputError(f"координата ({r}, {c}) вне {rows}x{cols}")
            if (r, c) in seen:
                raise InputError(f"повтор координаты ({r}, {c})")
            seen.add((r, c))
            v %= modulus
            if v:
                cleaned.append((int(r), int(c), int(v)))
        cleaned.sort()
        return cls(rows=rows, cols=cols, modulus=modulus, triples=tuple(cleaned))

    @classmethod
    def from_rows(cls, rows: List[Dict[int, int]], cols: int, modulus: int) -> "SparseMat":
        """Построение по списку строк-словарей {столбец: значение}"""
        triples = [(r, c, v) for r, row in enumerate(rows) for c, v in row.items()]
        return cls.from_triples(len(rows), cols, triples, modulus)

    def densify(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols), dtype=np.int64)
        for r, c, v in self.triples:
            dense[r, c] = v
        return dense

    def row_dicts(self) -> List[Dict[int, int]]:
        out: List[Dict[int, int]] = [dict() for _ in range(self.rows)]
        for r, c, v in self.triples:
            out[r][c] = v
        return out


class F2Echelon:
    """
    Ступенчатая форма над F_2 на битовых строках

    Строка - целое число Python; ведущий бит строки - её младший бит.
    """

    def __init__(self):
        self.pivots: Dict[int, int] = {}

    def add(self, row: int) -> bool:
        while row:
            low = (row & -row).bit_length() - 1
            pivot = self.pivots.get(low)
            if pivot is None:
                self.pivots[low] = row
                return True
            row ^= pivot
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def kernel(self, cols: int) -> List[int]:
        """Базис ядра: по вектору на свободный столбец, обратная подстановка"""
        order = sorted(self.pivots, reverse=True)
        basis = []
        for free in range(cols):
            if free in self.pivots:
                continue
            x = 1 << free
            for b in order:
                rest = self.pivots[b] & ~(1 << b)
                if bin(rest & x).count("1") & 1:
                    x |= 1 << b
            basis.append(x)
        return basis


class FpEchelon:
    """Ступенчатая форма над F_p на строках-словарях; ведущий столбец - минимальный"""

    def __init__(self, p: int):
        self.p = p
        self.pivots: Dict[int, Dict[int, int]] = {}

    def add(self, row: Dict[int, int]) -> bool:
        p = self.p
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            c = min(row)
            pivot = self.pivots.get(c)
            if pivot is None:
                inv = unit_inverse(row[c], p)
                self.pivots[c] = {k: (v * inv) % p for k, v in row.items()}
                return True
            f = row[c]
            for k, v in pivot.items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def kernel(self, cols: int) -> List[Dict[int, int]]:
        p = self.p
        order = sorted(self.pivots, reverse=True)
        basis = []
        for free in range(cols):
            if free in self.pivots:
                continue
            x = {free: 1}
            for b in order:
                total = sum(v * x.get(k, 0) for k, v in self.pivots[b].items() if k != b) % p
                if total:
                    x[b] = (-total) % p
            basis.append(x)
        return basis


def _echelon(a: SparseMat, p: int, desc: str):
    if p == 2:
        ech = F2Echelon()
        rows: Dict[int, int] = {}
        for r, c, _ in a.triples:
            rows[r] = rows.get(r, 0) | (1 << c)
        for r in progress(sorted(rows), desc=desc, total=len(rows)):
            ech.add(rows[r])
        return ech
    ech = FpEchelon(p)
    for row in progress(a.row_dicts(), desc=desc, total=a.rows):
        if row:
            ech.add(row)
    return ech


def sparse_rank_fp(a: SparseMat, p: Optional[int] = None) -> int:
    """
    Ранг разреженной матрицы над F_p

    Параметры:
    - a: разреженная матрица
    - p: простой модуль (по умолчанию модуль матрицы)

    Возвращает:
    - ранг, совпадающий с rref_fp плотной матрицы
    """
    p = a.modulus if p is None else p
    require_prime(p)
    if p != a.modulus:
        raise InputError(f"модуль матрицы {a.modulus} не равен {p}")
    return _echelon(a, p, "rank").rank


def sparse_kernel_fp(a: SparseMat, p: Optional[int] = None) -> np.ndarray:
    """Базис ядра разреженной матрицы над F_p (строки результата)"""
    p = a.modulus if p is None else p
    require_prime(p)
    ech = _echelon(a, p, "kernel")
    vectors = ech.kernel(a.cols)
    out = np.zeros((len(vectors), a.cols), dtype=np.int64)
    for i, vec in enumerate(vectors):
        if p == 2:
            bits = vec
            while bits:
                low = bits & -bits
                out[i, low.bit_length() - 1] = 1
                bits ^= low
        else:
            for c, v in vec.items():
                out[i, c] = v
    logger.debug(f"sparse kernel: {a.rows}x{a.cols}, rank {ech.rank}, kernel dim {len(vectors)}")
    return out
