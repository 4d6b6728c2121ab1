"""
Общие фикстуры тестов
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from modules.cohom.groups import cyclic, dihedral, elementary_abelian, quaternion  # noqa: E402


@pytest.fixture
def z2():
    return cyclic(2)


@pytest.fixture
def z4():
    return cyclic(4)


@pytest.fixture
def klein():
    return elementary_abelian(2, 2)


@pytest.fixture
def d4():
    return dihedral(4)


@pytest.fixture
def q8():
    return quaternion()
