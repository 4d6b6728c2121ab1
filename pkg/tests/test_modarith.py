import numpy as np
import pytest

from modules.modarith.dense import DenseMat, RowReducer, kernel_array, mat_mul, rank_fp, rref_fp, solve_fp
from modules.modarith.residue import Residue, prime_power, unit_inverse, valuation
from modules.modarith.smith import cokernel, smith_pk, solve_pk
from modules.modarith.sparse import SparseMat, sparse_kernel_fp, sparse_rank_fp
from utils.errors import InputError, UnsupportedError


def test_residue_arithmetic() -> None:
    a = Residue(5, 7)
    assert int(a + 4) == 2
    assert int(a * a) == 4
    assert int(a.inverse() * a) == 1
    assert int(a ** -1) == 3
    with pytest.raises(InputError):
        Residue(1, 7) + Residue(1, 5)


def test_prime_power_and_valuation() -> None:
    assert prime_power(8) == (2, 3)
    assert prime_power(12) is None
    assert valuation(12, 2, 3) == 2
    assert valuation(0, 3, 2) == 2
    assert unit_inverse(3, 8) == 3


def test_mat_mul_identity_and_mismatch() -> None:
    a = DenseMat([[1, 2], [3, 4]], 5)
    assert mat_mul(a, DenseMat.identity(2, 5)) == a
    assert mat_mul(a, a).entries() == (2, 0, 0, 2)
    with pytest.raises(InputError):
        mat_mul(a, DenseMat.identity(2, 7))
    with pytest.raises(InputError):
        mat_mul(a, DenseMat.zeros(3, 1, 5))


def test_rref_rank_plus_kernel() -> None:
    a = DenseMat([[1, 1, 0, 1], [0, 1, 1, 1], [1, 0, 1, 0]], 2)
    result = rref_fp(a)
    assert result.rank == 2
    assert result.rank + len(result.kernel_basis) == a.cols
    for v in result.kernel_basis:
        assert not np.mod(a.data @ np.array(v), 2).any()


def test_rref_rejects_composite_modulus() -> None:
    with pytest.raises(UnsupportedError):
        rref_fp(DenseMat([[2, 0], [0, 1]], 4))


def test_solve_fp_consistent_and_inconsistent() -> None:
    a = DenseMat([[1, 2], [2, 4]], 5)
    ok = solve_fp(a, [1, 2])
    assert ok.consistent
    assert tuple(np.mod(a.data @ np.array(ok.solution), 5)) == (1, 2)
    assert len(ok.kernel_basis) == 1
    bad = solve_fp(a, [1, 0])
    assert not bad.consistent and bad.solution is None


def test_row_reducer_and_empty_cases() -> None:
    reducer = RowReducer(3, 3, np.array([[1, 1, 0]]))
    assert reducer.contains([2, 2, 0])
    assert not reducer.contains([0, 1, 0])
    assert reducer.add([0, 1, 0])
    assert reducer.rank == 2
    assert rank_fp(np.zeros((0, 4), dtype=np.int64), 3) == 0
    assert kernel_array(np.zeros((0, 3), dtype=np.int64), 2).shape == (3, 3)


def test_smith_pk_divisors() -> None:
    form = smith_pk(DenseMat([[2, 0], [0, 4]], 8), 2, 3)
    assert sorted(form.divisors) == [2, 4]
    assert form.kernel_size == 2 * 4
    assert solve_pk(np.array([[2, 0], [0, 4]]), [2, 4], 2, 3) is not None
    assert solve_pk(np.array([[2, 0], [0, 4]]), [1, 0], 2, 3) is None


def test_smith_pk_rejects_wrong_modulus() -> None:
    with pytest.raises(InputError):
        smith_pk(DenseMat([[1]], 9), 2, 3)


def test_cokernel_invariants() -> None:
    coker = cokernel(np.array([[2, 0], [0, 0]]), 2, 2, 2)
    assert sorted(coker.invariants) == [2, 4]


def test_sparse_rank_matches_dense() -> None:
    rng = np.random.default_rng(7)
    for p in (2, 3, 5):
        dense = rng.integers(0, p, size=(12, 9))
        dense[rng.random(dense.shape) < 0.6] = 0
        triples = [(r, c, int(dense[r, c])) for r, c in zip(*np.nonzero(dense))]
        sparse = SparseMat.from_triples(12, 9, triples, p)
        assert sparse_rank_fp(sparse) == rank_fp(dense, p)
        kernel = sparse_kernel_fp(sparse)
        assert kernel.shape[0] == 9 - rank_fp(dense, p)
        assert not np.mod(dense @ kernel.T, p).any()


def test_sparse_rejects_duplicates() -> None:
    with pytest.raises(InputError):
        SparseMat.from_triples(2, 2, [(0, 0, 1), (0, 0, 1)], 2)
