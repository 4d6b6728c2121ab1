"""
Модуль вычетов
Отвечает за скаляры Z/m и теоретико-числовые вспомогательные функции
"""

from dataclasses import dataclass
from math import gcd
from functools import lru_cache
from typing import Optional, Tuple

from sympy import factorint, isprime, mod_inverse

from utils.errors import InputError, UnsupportedError

MAX_MODULUS = 2 ** 31


@lru_cache(maxsize=None)
def prime_power(m: int) -> Optional[Tuple[int, int]]:
    """Разложение m = p^k; None, если m не степень простого"""
    if m < 2:
        return None
    factors = factorint(m)
    if len(factors) != 1:
        return None
    (p, k), = factors.items()
    return int(p), int(k)


def require_modulus(m: int) -> int:
    """Проверка допустимости модуля"""
    if not isinstance(m, (int,)) or isinstance(m, bool) or m < 1 or m > MAX_MODULUS:
        raise InputError(f"модуль должен быть целым в [1, 2^31], получено {m!r}")
    return int(m)


def require_prime(p: int) -> int:
    """Проверка простоты модуля (для исключения над F_p)"""
    require_modulus(p)
    if not isprime(p):
        raise UnsupportedError(f"модуль {p} не простой")
    return int(p)


def require_prime_power(m: int) -> Tuple[int, int]:
    """Проверка, что модуль - степень простого; возвращает (p, k)"""
    require_modulus(m)
    pk = prime_power(m)
    if pk is None:
        raise UnsupportedError(f"модуль {m} не является степенью простого")
    return pk


def unit_inverse(a: int, m: int) -> int:
    """Обратный элемент по модулю m"""
    try:
        return int(mod_inverse(int(a) % m, m))
    except ValueError:
        raise InputError(f"{a} не обратим по модулю {m}")


def is_unit(a: int, m: int) -> bool:
    """Является ли a обратимым по модулю m"""
    return gcd(int(a) % m, m) == 1


def valuation(x: int, p: int, k: int) -> int:
    """p-нормирование вычета x по модулю p^k (нулю соответствует k)"""
    x %= p ** k
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class Residue:
    """Вычет по модулю m; значение всегда приведено в [0, m)"""

    value: int
    modulus: int

    def __post_init__(self):
        require_modulus(self.modulus)
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise InputError(f"разные модули {self.modulus} и {other.modulus}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Residue(self.value + v, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Residue(self.value - v, self.modulus)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Residue(v - self.value, self.modulus)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Residue(self.value * v, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return Residue(pow(self.value, exponent, self.modulus), self.modulus)

    def inverse(self) -> "Residue":
        return Residue(unit_inverse(self.value, self.modulus), self.modulus)

    def is_unit(self) -> bool:
        return is_unit(self.value, self.modulus)

    def __int__(self) -> int:
        return self.value
