"""
Модуль задач о произведениях Масси
Отвечает за описание задачи (Γ, n, коэффициенты, α_0..α_{n-1}), модули
M_{i,j} и разбор задачи из файла
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from modules.cohom.gmodule import GModule, from_character, trivial
from modules.cohom.groups import FiniteGroup, cyclic, named_group
from modules.cohom.h1 import is_cocycle1
from modules.cohom.lifting import brute_force_homs
from modules.modarith.residue import is_unit, prime_power, require_prime
from modules.unigroup.pattern import MatrixQuotient, centre_pattern, u1_pattern
from modules.unigroup.triw import TriWGroup, build_TW
from utils.errors import InputError, UnsupportedError

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(eq=False)
class MasseyProblem:
    """
    Задача о n-кратном произведении Масси ⟨α_0, ..., α_{n-1}⟩

    Классический случай: characters = None, коэффициенты F_p с
    тривиальным действием. Обобщённый: N_i = Z/m, Γ действует на N_i
    характером χ_i, M_{i,j} = Hom(N_j, N_i) с действием χ_i·χ_j^{-1}.

    alphas[i] - 1-коцикл Γ → M_{i,i+1} (значения на всех элементах).
    """

    gamma: FiniteGroup
    n: int
    modulus: int
    alphas: List[np.ndarray] = field(repr=False)
    characters: Optional[np.ndarray] = field(repr=False, default=None)
    name: str = "massey"

    def __post_init__(self):
        if self.n < 2:
            raise InputError(f"n должно быть >= 2, получено {self.n}")
        if self.characters is None:
            require_prime(self.modulus)
        elif prime_power(self.modulus) is None:
            raise UnsupportedError(f"модуль {self.modulus} не является степенью простого")
        order = self.gamma.order
        self.alphas = [np.mod(np.asarray(a, dtype=np.int64).reshape(order), self.modulus) for a in self.alphas]
        if len(self.alphas) != self.n:
            raise InputError(f"ожидалось {self.n} классов α_i, получено {len(self.alphas)}", path="alphas")
        self._modules: Dict[Pair, GModule] = {}
        self.context: Optional[TriWGroup] = None
        if self.characters is not None:
            self.characters = np.mod(np.asarray(self.characters, dtype=np.int64), self.modulus)
            if self.characters.shape != (self.n + 1, order):
                raise InputError(f"характеры должны иметь форму ({self.n + 1}, {order})", path="characters")
            for i, chi in enumerate(self.characters):
                if not all(is_unit(int(v), self.modulus) for v in chi):
                    raise InputError(f"значения χ_{i} не обратимы", path=f"characters[{i}]")
                if not (chi[self.gamma.table] == np.mod(chi[:, None] * chi[None, :], self.modulus)).all():
                    raise InputError(f"χ_{i} не гомоморфизм", path=f"characters[{i}]")
            self.context = build_TW(self.n, self.modulus,
                                    diag_actions=[sorted(set(int(v) for v in chi)) for chi in self.characters])
        for i, alpha in enumerate(self.alphas):
            if not is_cocycle1(self.module(i, i + 1), alpha.reshape(-1, 1)):
                raise InputError(f"α_{i} не является 1-коциклом", path=f"alphas[{i}]")

    @property
    def generalized(self) -> bool:
        return self.characters is not None

    def character(self, i: int) -> np.ndarray:
        if self.characters is None:
            return np.ones(self.gamma.order, dtype=np.int64)
        return self.characters[i]

    def character_inverse(self, i: int) -> np.ndarray:
        chi = self.character(i)
        return chi[self.gamma.inverses]

    def module(self, i: int, j: int) -> GModule:
        """M_{i,j} как Γ-модуль ранга 1"""
        if (i, j) not in self._modules:
            if self.characters is None:
                self._modules[(i, j)] = trivial(self.gamma, self.modulus)
            else:
                values = np.mod(self.character(i) * self.character_inverse(j), self.modulus)
                self._modules[(i, j)] = from_character(self.gamma, self.modulus, values, name=f"M_{i}{j}")
        return self._modules[(i, j)]

    def pairs(self) -> List[Pair]:
        """Пары (i, j) определяющей системы по возрастанию длины, без (0, n)"""
        n = self.n
        return [(i, i + d) for d in range(1, n + 1) for i in range(n - d + 1) if (i, i + d) != (0, n)]

    def quotient(self, pattern) -> MatrixQuotient:
        if self.context is not None and frozenset(pattern) == u1_pattern(self.n):
            return self.context.a_quotient
        if self.context is not None and frozenset(pattern) == centre_pattern(self.n):
            return self.context.z_quotient
        return MatrixQuotient(self.n, self.modulus, pattern)

    def alpha_images(self) -> List[np.ndarray]:
        """α: Γ → A(W) = T/U¹: диагональ χ_i(σ), побочная диагональ α_i(σ)·χ_{i+1}(σ)"""
        m = self.modulus
        images = []
        for g in range(self.gamma.order):
            mat = np.diag(np.array([int(self.character(i)[g]) for i in range(self.n + 1)], dtype=np.int64))
            for i, alpha in enumerate(self.alphas):
                mat[i, i + 1] = (int(alpha[g]) * int(self.character(i + 1)[g])) % m
            images.append(mat)
        return images

    def is_element(self, x: np.ndarray) -> bool:
        """Матрица лежит в T(W) (в классическом случае - в U)"""
        if self.context is not None:
            return self.context.is_element(x)
        return bool((np.diag(x) % self.modulus == 1).all() and not np.tril(x, -1).any())

    def describe(self) -> Dict[str, Any]:
        return {
            "group": self.gamma.name,
            "order": self.gamma.order,
            "n": self.n,
            "modulus": self.modulus,
            "generalized": self.generalized,
            "alphas": [a.tolist() for a in self.alphas],
        }


def _extend_character(group: FiniteGroup, values: Sequence[int], m: int) -> np.ndarray:
    gen_values = dict(zip(group.generators, (int(v) % m for v in values)))
    chi = np.ones(group.order, dtype=np.int64)
    for g, s, h in group.spanning_tree():
        chi[g] = (gen_values[s] * chi[h]) % m
    return chi


def _extend_cocycle(module: GModule, values: Sequence[int]) -> np.ndarray:
    group = module.group
    gen_values = dict(zip(group.generators, (int(v) % module.modulus for v in values)))
    f = np.zeros(group.order, dtype=np.int64)
    for g, s, h in group.spanning_tree():
        f[g] = (gen_values[s] + int(module.action[s, 0, 0]) * f[h]) % module.modulus
    return f


def problem_from_spec(spec: Dict[str, Any], path: str = "problem") -> MasseyProblem:
    """
    Задача из описания файла

    {"group": {...}, "n": 3, "p": 2, "alphas": [[значения на порождающих], ...]};
    обобщённый случай: "modulus": m и "characters": [[значения χ_i на порождающих], ...]
    """
    try:
        group = named_group(spec["group"], f"{path}.group")
        n = int(spec["n"])
        raw_alphas = spec["alphas"]
    except KeyError as exc:
        raise InputError(f"нет обязательного поля {exc.args[0]}", path=path) from exc
    for i, values in enumerate(raw_alphas):
        if len(values) != len(group.generators):
            raise InputError(f"ожидалось {len(group.generators)} значений на порождающих",
                             path=f"{path}.alphas[{i}]")
    if "characters" in spec:
        m = int(spec.get("modulus", spec.get("p", 0)))
        chars = np.array([_extend_character(group, values, m) for values in spec["characters"]], dtype=np.int64)
        modules = [from_character(group, m, np.mod(chars[i] * chars[i + 1][group.inverses], m))
                   for i in range(len(raw_alphas)) if i + 1 < chars.shape[0]]
        if len(modules) != len(raw_alphas):
            raise InputError("характеров должно быть n + 1", path=f"{path}.characters")
        alphas = [_extend_cocycle(mod, values) for mod, values in zip(modules, raw_alphas)]
        return MasseyProblem(group, n, m, alphas, characters=chars, name=spec.get("name", "massey"))
    m = int(spec.get("p", spec.get("modulus", 0)))
    module = trivial(group, m)
    alphas = [_extend_cocycle(module, values) for values in raw_alphas]
    return MasseyProblem(group, n, m, alphas, name=spec.get("name", "massey"))


def characters_into(group: FiniteGroup, p: int) -> List[np.ndarray]:
    """Все гомоморфизмы Γ → F_p (как значения на элементах)"""
    target = cyclic(p)
    return [np.array(h, dtype=np.int64) for h in brute_force_homs(group, target)]
