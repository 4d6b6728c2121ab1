"""
Модуль G-модулей
Отвечает за конечные абелевы группы коэффициентов (Z/m)^k с действием
группы матрицами и их ограничение на подгруппы
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from modules.cohom.groups import FiniteGroup
from modules.modarith.dense import matmul_mod
from modules.modarith.residue import prime_power, require_modulus
from utils.errors import InputError, UnsupportedError

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class GModule:
    """
    G-модуль (Z/m)^k

    action[g] - матрица действия g (столбцы - образы базисных векторов)
    """

    group: FiniteGroup
    modulus: int
    action: np.ndarray = field(repr=False)
    name: str = "M"

    def __post_init__(self):
        require_modulus(self.modulus)
        self.action = np.mod(np.asarray(self.action, dtype=np.int64), self.modulus)
        if self.action.ndim != 3 or self.action.shape[0] != self.group.order \
                or self.action.shape[1] != self.action.shape[2]:
            raise InputError(f"действие модуля {self.name} должно иметь форму (|G|, k, k)")
        self.validate()

    @property
    def rank(self) -> int:
        return int(self.action.shape[1])

    @property
    def size(self) -> int:
        return self.modulus ** self.rank

    @property
    def prime_power(self) -> Tuple[int, int]:
        pk = prime_power(self.modulus)
        if pk is None:
            raise UnsupportedError(f"модуль {self.modulus} не является степенью простого")
        return pk

    def is_trivial(self) -> bool:
        eye = np.eye(self.rank, dtype=np.int64)
        return bool((self.action == eye[None]).all())

    def validate(self) -> None:
        """Действие - гомоморфизм: проверка на парах (порождающий, элемент)"""
        g = self.group
        eye = np.eye(self.rank, dtype=np.int64)
        if not np.array_equal(self.action[g.identity], eye):
            raise InputError(f"нейтральный элемент действует нетривиально на {self.name}")
        for s in g.generators:
            prods = np.mod(np.einsum("ij,njk->nik", self.action[s], self.action), self.modulus)
            bad = np.flatnonzero((prods != self.action[g.table[s]]).any(axis=(1, 2)))
            if bad.size:
                raise InputError(f"действие на {self.name} не гомоморфизм: s={s}, g={int(bad[0])}")

    def act(self, g: int, v: np.ndarray) -> np.ndarray:
        return np.mod(self.action[g] @ np.asarray(v, dtype=np.int64), self.modulus)

    def restrict(self, elements: np.ndarray, subgroup: FiniteGroup) -> "GModule":
        """Ограничение на подгруппу (elements - вложение H -> G)"""
        return GModule(subgroup, self.modulus, self.action[np.asarray(elements)], name=f"{self.name}|H")


def trivial(group: FiniteGroup, modulus: int, rank: int = 1) -> GModule:
    action = np.broadcast_to(np.eye(rank, dtype=np.int64), (group.order, rank, rank)).copy()
    return GModule(group, modulus, action, name=f"(Z/{modulus})^{rank}")


def from_generator_matrices(group: FiniteGroup, modulus: int, matrices: Dict[int, np.ndarray],
                            name: str = "M") -> GModule:
    """
    Модуль по матрицам порождающих; действие продолжается по дереву обхода

    Параметры:
    - matrices: порождающий -> обратимая матрица k x k над Z/m
    """
    require_modulus(modulus)
    missing = [s for s in group.generators if s not in matrices]
    if missing:
        raise InputError(f"не заданы матрицы порождающих {missing}")
    rank = np.asarray(matrices[group.generators[0]]).shape[0] if group.generators else 1
    action = np.zeros((group.order, rank, rank), dtype=np.int64)
    action[group.identity] = np.eye(rank, dtype=np.int64)
    for g, s, h in group.spanning_tree():
        action[g] = matmul_mod(np.asarray(matrices[s], dtype=np.int64), action[h], modulus)
    return GModule(group, modulus, action, name=name)


def from_character(group: FiniteGroup, modulus: int, values: Sequence[int], name: str = "chi") -> GModule:
    """Модуль ранга 1: g действует умножением на values[g] ∈ (Z/m)*"""
    values = np.mod(np.asarray(values, dtype=np.int64), modulus)
    if values.shape != (group.order,):
        raise InputError(f"характер должен иметь {group.order} значений")
    return GModule(group, modulus, values.reshape(-1, 1, 1), name=name)


def hom_action(group: FiniteGroup, images: np.ndarray, modulus: int, name: str = "M") -> GModule:
    """Модуль из гомоморфизма в GL_k(Z/m), заданного матрицами всех элементов"""
    return GModule(group, modulus, np.asarray(images, dtype=np.int64), name=name)


def module_from_spec(group: FiniteGroup, spec: Dict, path: str = "module") -> GModule:
    """
    Модуль по описанию из файла задачи

    {"modulus": m, "rank": k} - тривиальное действие;
    {"modulus": m, "generators": [[...], ...]} - матрицы порождающих по порядку
    {"modulus": m, "character": [...]} - значения характера на элементах
    """
    try:
        modulus = int(spec["modulus"])
    except KeyError as exc:
        raise InputError("нет обязательного поля modulus", path=path) from exc
    if "generators" in spec:
        mats = spec["generators"]
        if len(mats) != len(group.generators):
            raise InputError(f"ожидалось {len(group.generators)} матриц", path=f"{path}.generators")
        return from_generator_matrices(group, modulus, dict(zip(group.generators, (np.array(m) for m in mats))))
    if "character" in spec:
        return from_character(group, modulus, spec["character"])
    return trivial(group, modulus, int(spec.get("rank", 1)))
