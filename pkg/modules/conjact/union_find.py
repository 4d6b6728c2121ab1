"""
Модуль систем непересекающихся множеств
Отвечает за разбиение на орбиты: словарный UnionFind для малых множеств
и векторизованный ArrayUnionFind для плотных индексов
"""

import logging
from typing import Callable, Dict, Hashable, Iterable, List, Set

import numpy as np

logger = logging.getLogger(__name__)


class UnionFind:
    """Система непересекающихся множеств на произвольных хешируемых элементах"""

    def __init__(self, items: Iterable[Hashable]):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in self.parent}
        self.size = {x: 1 for x in self.parent}

    def find(self, x: Hashable) -> Hashable:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: Hashable, y: Hashable) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x
        self.size[x] += self.size[y]
        del self.rank[y]

    def reps(self) -> Set[Hashable]:
        return set(self.rank)

    def groups(self) -> Dict[Hashable, List[Hashable]]:
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out

    def __len__(self) -> int:
        return len(self.rank)


def find_orbits(gens: Iterable, space: Iterable[Hashable], action: Callable) -> Dict[Hashable, Set[Hashable]]:
    """Орбиты действия, заданного порождающими"""
    space = list(space)
    uf = UnionFind(space)
    for g in gens:
        for x in space:
            uf.union(x, action(g, x))
    orbits = {rep: set() for rep in uf.reps()}
    for x in space:
        orbits[uf.find(x)].add(x)
    return orbits


class ArrayUnionFind:
    """
    Векторизованная система множеств на индексах 0..size-1

    Корень каждого множества - его минимальный индекс:
    при слиянии больший корень подвешивается к меньшему.
    """

    def __init__(self, size: int):
        dtype = np.int32 if size < 2 ** 31 else np.int64
        self.parent = np.arange(size, dtype=dtype)

    def compress(self) -> None:
        while True:
            grand = self.parent[self.parent]
            if np.array_equal(grand, self.parent):
                return
            self.parent = grand

    def union_pairs(self, left: np.ndarray, right: np.ndarray) -> bool:
        """Объединение пар (left[k], right[k]); True, если что-то изменилось"""
        ru = self.parent[left]
        rv = self.parent[right]
        mask = ru != rv
        if not mask.any():
            return False
        ru, rv = ru[mask], rv[mask]
        hi = np.maximum(ru, rv)
        lo = np.minimum(ru, rv)
        np.minimum.at(self.parent, hi, lo)
        return True

    def roots(self) -> np.ndarray:
        self.compress()
        return self.parent
