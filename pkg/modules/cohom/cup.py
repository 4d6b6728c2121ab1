"""
Модуль 2-коцепей
Отвечает за кограницу 1-коцепей, скрученное cup-произведение,
проверку 2-коциклов и решение уравнения ∂f = c
"""

import logging
from typing import Optional

import numpy as np

from modules.cohom.gmodule import GModule
from modules.modarith.dense import RowReducer, solve_array_fp
from modules.modarith.smith import solve_pk
from utils.errors import InputError

logger = logging.getLogger(__name__)


def coboundary2(module: GModule, f: np.ndarray) -> np.ndarray:
    """(∂f)(g, h) = g·f(h) - f(gh) + f(g)"""
    g = module.group
    f = np.asarray(f, dtype=np.int64).reshape(g.order, module.rank)
    acted = np.einsum("gij,hj->ghi", module.action, f)
    return np.mod(acted - f[g.table] + f[:, None, :], module.modulus)


def is_cocycle2(module: GModule, c: np.ndarray) -> bool:
    """
    δc = 0 на тройках (s, h, l) для s из порождающих и нейтрального

    δc(g,h,l) = g·c(h,l) - c(gh,l) + c(g,hl) - c(g,h); для 3-кограницы
    D = δc тождество δD = 0 даёт D(sh,·,·) = s·D(h,·,·), так что этих
    троек достаточно.
    """
    g = module.group
    m = module.modulus
    c = np.mod(np.asarray(c, dtype=np.int64).reshape(g.order, g.order, module.rank), m)
    for x in [g.identity] + list(g.generators):
        acted = np.einsum("ij,hlj->hli", module.action[x], c)
        total = acted - c[g.table[x]] + c[x][g.table] - c[x][:, None, :]
        if np.mod(total, m).any():
            return False
    return True


def cup11(a: np.ndarray, left: GModule, b: np.ndarray, right: GModule,
          pairing: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Скрученное cup-произведение 1-коцепей

    Параметры:
    - a: 1-коцепь в left (|G| x k_a)
    - b: 1-коцепь в right (|G| x k_b)
    - pairing: билинейное отображение как тензор (k_a, k_b, k_c); по
      умолчанию умножение в Z/m для модулей ранга 1

    Возвращает:
    - 2-коцепь (a ∪ b)(σ, τ) = a(σ)·σ(b(τ)) формы (|G|, |G|, k_c)
    """
    if left.group is not right.group:
        raise InputError("cup-произведение коцепей на разных группах")
    if left.modulus != right.modulus:
        raise InputError(f"несовместимые модули {left.modulus} и {right.modulus}")
    m = left.modulus
    order = left.group.order
    if pairing is None:
        if left.rank != 1 or right.rank != 1:
            raise InputError("для модулей ранга > 1 нужно явное спаривание")
        pairing = np.ones((1, 1, 1), dtype=np.int64)
    pairing = np.asarray(pairing, dtype=np.int64)
    if pairing.ndim != 3 or pairing.shape[:2] != (left.rank, right.rank):
        raise InputError(f"спаривание формы {pairing.shape} несовместимо с рангами {left.rank}, {right.rank}")
    a = np.mod(np.asarray(a, dtype=np.int64).reshape(order, left.rank), m)
    b = np.mod(np.asarray(b, dtype=np.int64).reshape(order, right.rank), m)
    acted = np.mod(np.einsum("sij,tj->sti", right.action, b), m)
    return np.mod(np.einsum("si,stj,ijl->stl", a, acted, pairing), m)


def _boundary_system(module: GModule, c: np.ndarray):
    g = module.group
    k = module.rank
    size = g.order * k
    eye = np.eye(k, dtype=np.int64)
    blocks, rhs = [], []
    for s in g.generators:
        for h in range(g.order):
            block = np.zeros((k, size), dtype=np.int64)
            sh = g.mul(s, h)
            block[:, h * k:(h + 1) * k] += module.action[s]
            block[:, sh * k:(sh + 1) * k] -= eye
            block[:, s * k:(s + 1) * k] += eye
            blocks.append(block)
            rhs.append(c[s, h])
    start = np.zeros((k, size), dtype=np.int64)
    start[:, g.identity * k:(g.identity + 1) * k] = eye
    blocks.append(start)
    rhs.append(c[g.identity, g.identity])
    mat = np.mod(np.concatenate(blocks, axis=0), module.modulus)
    return mat, np.mod(np.concatenate(rhs), module.modulus)


def coboundary2_test(module: GModule, c: np.ndarray, validate: bool = True) -> Optional[np.ndarray]:
    """
    Решение ∂f = c

    Строки системы - пары (s, h) с порождающим s и условие f(e) = c(e, e);
    для коцикла c из них следует равенство на всех парах.

    Параметры:
    - module: G-модуль над F_p или Z/p^k
    - c: 2-коцикл формы (|G|, |G|, k)

    Возвращает:
    - 1-коцепь f (|G| x k) или None, если класс c нетривиален
    """
    g = module.group
    c = np.mod(np.asarray(c, dtype=np.int64).reshape(g.order, g.order, module.rank), module.modulus)
    if validate and not is_cocycle2(module, c):
        raise InputError("коцепь не является 2-коциклом")
    p, k = module.prime_power
    mat, rhs = _boundary_system(module, c)
    if k == 1:
        x = solve_array_fp(mat, rhs, p)
    else:
        x = solve_pk(mat, rhs, p, k)
    if x is None:
        return None
    return x.reshape(g.order, module.rank)


def coboundary_space(module: GModule) -> RowReducer:
    """B²(G, M) над F_p как подпространство (|G|²·k)-векторов"""
    g = module.group
    p, k = module.prime_power
    if k != 1:
        raise InputError("пространство кограниц строится только над F_p")
    size = g.order * module.rank
    vectors = []
    for t in range(size):
        f = np.zeros(size, dtype=np.int64)
        f[t] = 1
        vectors.append(coboundary2(module, f).reshape(-1))
    return RowReducer(g.order * g.order * module.rank, p, np.array(vectors, dtype=np.int64))


def class_key(reducer: RowReducer, c: np.ndarray) -> tuple:
    """Канонический представитель класса 2-коцикла: остаток по модулю B²"""
    return tuple(int(v) for v in reducer.reduce(np.asarray(c).reshape(-1)))
