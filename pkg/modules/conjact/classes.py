"""
Модуль классов сопряжённости U¹
Отвечает за плотную нумерацию элементов U¹, разбиение на классы
объединением орбит сопряжения порождающими и проверку разбиения
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from config.settings import BUDGET_CONFIG, SCAN_CONFIG
from modules.conjact.union_find import ArrayUnionFind, find_orbits
from modules.modarith.residue import require_prime
from modules.unigroup.unitri import (
    Position, b_positions, batch_matmul, batch_unipotent_inverse, positions,
)
from utils.errors import InputError
from utils.helpers import budget, check_record, ensure_budget, parallel_map, progress

logger = logging.getLogger(__name__)


class U1Indexer:
    """
    Плотная нумерация U¹: цифры в системе счисления по основанию p
    в диагональном порядке позиций длины >= 2 (младшая цифра - (0, 2))
    """

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.positions: Tuple[Position, ...] = positions(n, 2)
        self.index = {pos: t for t, pos in enumerate(self.positions)}
        self.width = len(self.positions)
        self.size = p ** self.width
        self.weights = np.array([p ** t for t in range(self.width)], dtype=np.int64)
        self.rows = np.array([i for i, _ in self.positions], dtype=np.int64)
        self.cols = np.array([j for _, j in self.positions], dtype=np.int64)

    def digits(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        return (indices[..., None] // self.weights) % self.p

    def encode(self, digits: np.ndarray) -> np.ndarray:
        return np.asarray(digits, dtype=np.int64) @ self.weights

    def matrices(self, indices: np.ndarray) -> np.ndarray:
        digits = self.digits(indices)
        mats = np.broadcast_to(np.eye(self.n + 1, dtype=np.int64), digits.shape[:-1] + (self.n + 1, self.n + 1)).copy()
        mats[..., self.rows, self.cols] = digits
        return mats

    def from_matrices(self, mats: np.ndarray) -> np.ndarray:
        """Индексы матриц из U¹ (проверяется нулевая первая побочная диагональ)"""
        mats = np.mod(np.asarray(mats, dtype=np.int64), self.p)
        if self.n >= 1 and np.diagonal(mats, 1, -2, -1).any():
            raise InputError("матрица не лежит в U¹")
        return self.encode(mats[..., self.rows, self.cols])

    def conjugation_image(self, digits: np.ndarray, a: int, b: int) -> np.ndarray:
        """
        Цифры e_{a,b} x e_{a,b}^{-1}: строка a += строка b, затем столбец b -= столбец a

        Все обновления читают исходные элементы x.
        """
        out = digits.copy()
        p = self.p
        for j in range(b + 2, self.n + 1):
            out[:, self.index[(a, j)]] = (digits[:, self.index[(a, j)]] + digits[:, self.index[(b, j)]]) % p
        for i in range(0, a - 1):
            out[:, self.index[(i, b)]] = (digits[:, self.index[(i, b)]] - digits[:, self.index[(i, a)]]) % p
        return out

    def generator_image(self, a: int, b: int, chunk: Optional[int] = None) -> np.ndarray:
        """Перестановка индексов U¹, задаваемая сопряжением элементом e_{a,b}"""
        chunk = chunk or BUDGET_CONFIG["class_chunk"]
        dtype = np.int32 if self.size < 2 ** 31 else np.int64
        image = np.empty(self.size, dtype=dtype)
        for start in range(0, self.size, chunk):
            idx = np.arange(start, min(start + chunk, self.size), dtype=np.int64)
            image[start:start + len(idx)] = self.encode(self.conjugation_image(self.digits(idx), a, b))
        return image


@dataclass
class ConjClasses:
    """
    Разбиение U¹ на классы сопряжённости

    class_of[x] - номер класса элемента с индексом x; reps[c] - минимальный индекс класса c.
    """

    n: int
    p: int
    indexer: U1Indexer
    class_of: np.ndarray
    reps: np.ndarray
    sizes: np.ndarray
    _rep_mats: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def count(self) -> int:
        return int(len(self.reps))

    @property
    def size(self) -> int:
        return self.indexer.size

    def rep_matrices(self) -> np.ndarray:
        if self._rep_mats is None:
            self._rep_mats = self.indexer.matrices(self.reps)
        return self._rep_mats

    def rep_b_coords(self) -> np.ndarray:
        """to_B представителей: первые цифры индекса (позиции длины 2 и 3)"""
        return self.indexer.digits(self.reps)[:, :len(b_positions(self.n))]

    def classes_of_matrices(self, mats: np.ndarray) -> np.ndarray:
        return self.class_of[self.indexer.from_matrices(mats)].astype(np.int64)

    def class_of_matrix(self, mat: np.ndarray) -> int:
        return int(self.classes_of_matrices(np.asarray(mat)[None])[0])


def conj_classes(n: int, p: int, max_elems: Optional[int] = None, workers: Optional[int] = None) -> ConjClasses:
    """
    Классы сопряжённости U¹

    Параметры:
    - n, p: размер и простое
    - max_elems: переопределение бюджета перечисления
    - workers: число потоков для построения перестановок

    Возвращает:
    - ConjClasses
    """
    require_prime(p)
    if n < 2:
        raise InputError(f"требуется n >= 2, получено {n}")
    indexer = U1Indexer(n, p)
    ensure_budget("max_elems", indexer.size, max_elems)
    gens = list(b_positions(n))
    cache_bytes = indexer.size * 4 * len(gens)
    cached = cache_bytes <= budget("perm_cache_bytes")
    logger.info(f"классы U¹: n={n}, p={p}, |U¹|={indexer.size}, порождающих {len(gens)}, кэш={cached}")

    perms = parallel_map(lambda pos: indexer.generator_image(*pos), gens, workers) if cached else None
    uf = ArrayUnionFind(indexer.size)
    everything = np.arange(indexer.size, dtype=uf.parent.dtype)
    rounds = 0
    changed = True
    while changed:
        changed = False
        rounds += 1
        for t, pos in enumerate(progress(gens, desc=f"union round {rounds}")):
            image = perms[t] if cached else indexer.generator_image(*pos)
            uf.compress()
            if uf.union_pairs(everything, image):
                changed = True
        uf.compress()
    roots = uf.roots()
    reps = np.unique(roots)
    class_of = np.searchsorted(reps, roots).astype(np.int32)
    sizes = np.bincount(class_of, minlength=len(reps))
    logger.info(f"классы U¹: {len(reps)} классов за {rounds} раундов")
    return ConjClasses(n, p, indexer, class_of, reps.astype(np.int64), sizes)


def random_u1(indexer: U1Indexer, count: int, rng: np.random.Generator) -> np.ndarray:
    return indexer.matrices(rng.integers(0, indexer.size, size=count))


def spot_check_classes(classes: ConjClasses, samples: Optional[int] = None, seed: Optional[int] = None) -> Dict:
    """Постоянство class_of на орбитах: случайные сопряжения случайными элементами U¹"""
    samples = SCAN_CONFIG["class_spot_checks"] if samples is None else samples
    rng = np.random.default_rng(SCAN_CONFIG["seed"] if seed is None else seed)
    indexer, p = classes.indexer, classes.p
    xs = rng.integers(0, indexer.size, size=samples)
    gs = random_u1(indexer, samples, rng)
    conj = batch_matmul(batch_matmul(gs, indexer.matrices(xs), p), batch_unipotent_inverse(gs, p), p)
    before = classes.class_of[xs]
    after = classes.classes_of_matrices(conj)
    bad = np.flatnonzero(before != after)
    witness = None if not bad.size else {"element": int(xs[bad[0]]), "conjugator": gs[bad[0]]}
    reps_ok = bool(np.array_equal(classes.class_of[classes.reps], np.arange(classes.count)))
    minimal_ok = bool(np.all(np.minimum.reduceat(np.argsort(classes.class_of, kind="stable"),
                                                  np.r_[0, np.cumsum(classes.sizes)[:-1]]) == classes.reps))
    return check_record("classes_constant_on_orbits", not bad.size and reps_ok and minimal_ok, witness)


def orbit_class_count(n: int, p: int) -> int:
    """Число классов перебором: замыкание сопряжениями всеми элементами U¹"""
    indexer = U1Indexer(n, p)
    ensure_budget("max_elems", indexer.size ** 2)
    elems = indexer.matrices(np.arange(indexer.size))
    inverses = batch_unipotent_inverse(elems, p)
    images = {}
    for g, gi in zip(elems, inverses):
        images[g.tobytes()] = indexer.from_matrices(batch_matmul(batch_matmul(g, elems, p), gi, p))
    orbits = find_orbits(list(images), range(indexer.size), lambda g, x: int(images[g][x]))
    return len(orbits)

