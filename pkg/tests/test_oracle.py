import numpy as np
import pytest

from kronsum import CapacityError, DimensionError, SingularMatrixError
from kronsum.oracle import MAX_ORACLE_ORDER, lu_factor, lu_solve, oracle_solve_kron
from kronsum.tensor import apply_kron_sum, kronecker_sum, kronecker_sum2, kronecker_sum3, vec


def rc(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_lu_identity():
    y = np.array([1.0, -2.0, 3.0])
    np.testing.assert_array_equal(lu_solve(lu_factor(np.eye(3)), y), y)


def test_lu_hand_example():
    x = lu_solve(lu_factor([[2, 1], [1, 3]]), [3, 4])
    np.testing.assert_allclose(x, [1, 1], atol=1e-15)


def test_lu_random_residual_and_factors():
    rng = np.random.default_rng(0)
    a = rc(rng, 20, 20) + 5 * np.eye(20)
    fac = lu_factor(a)
    assert np.linalg.norm(a[fac.perm] - fac.L @ fac.U) <= 1e-11 * np.linalg.norm(a)
    assert np.max(np.abs(np.tril(fac.L, -1))) <= 1.0
    y = rc(rng, 20)
    x = lu_solve(fac, y)
    assert np.linalg.norm(a @ x - y) <= 1e-10 * np.linalg.norm(a) * np.linalg.norm(x)
    assert fac.growth >= 1.0 - 1e-12


def test_lu_multiple_rhs():
    rng = np.random.default_rng(1)
    a = rc(rng, 6, 6) + 3 * np.eye(6)
    y = rc(rng, 6, 3)
    np.testing.assert_allclose(a @ lu_solve(lu_factor(a), y), y, atol=1e-12)


def test_lu_pivots_zero_leading_entry():
    x = lu_solve(lu_factor([[0, 1], [1, 0]]), [2, 3])
    np.testing.assert_allclose(x, [3, 2], atol=0)


def test_lu_singular():
    with pytest.raises(SingularMatrixError):
        lu_factor([[1, 2], [2, 4]])


def test_lu_rhs_length():
    with pytest.raises(DimensionError):
        lu_solve(lu_factor(np.eye(2)), np.ones(3))


def test_oracle_identity_factors():
    y = rc(np.random.default_rng(2), 2, 3, 2)
    x = oracle_solve_kron([np.eye(2), np.eye(3), np.eye(2)], y)
    np.testing.assert_allclose(x, y / 3, atol=1e-15)


def test_oracle_diagonal_factors():
    l1, l2 = np.array([1.0, 2.0, 3.0]), np.array([5.0, 7.0])
    y = np.ones((3, 2))
    x = oracle_solve_kron([np.diag(l1), np.diag(l2)], y)
    np.testing.assert_allclose(x, 1 / (l1[:, None] + l2[None, :]), rtol=1e-15)


def test_oracle_size_guard():
    n = int(round(MAX_ORACLE_ORDER ** 0.5)) + 1
    with pytest.raises(CapacityError):
        oracle_solve_kron([np.eye(n), np.eye(n)], np.ones((n, n)))


def test_oracle_shape_check():
    with pytest.raises(DimensionError):
        oracle_solve_kron([np.eye(2), np.eye(3)], np.ones((3, 2)))


@pytest.mark.parametrize("seed", range(10))
def test_sylvester_matrix_form(seed):
    rng = np.random.default_rng(seed)
    na, nb = rng.integers(1, 6, size=2)
    a, b, x = rc(rng, na, na), rc(rng, nb, nb), rc(rng, nb, na)
    dense = kronecker_sum2(a, b) @ vec(x)
    lhs = vec(x @ a.T + b @ x)
    assert np.linalg.norm(lhs - dense) <= 1e-12 * np.linalg.norm(dense)


@pytest.mark.parametrize("seed", range(10))
def test_sylvester_tensor_form(seed):
    rng = np.random.default_rng(100 + seed)
    dims = [int(n) for n in rng.integers(1, 5, size=3)]
    a1, a2, a3 = (rc(rng, n, n) for n in dims)
    x = rc(rng, *dims)
    dense = kronecker_sum3(a3, a2, a1) @ vec(x)
    assert np.linalg.norm(vec(apply_kron_sum([a1, a2, a3], x)) - dense) <= 1e-12 * np.linalg.norm(dense)


def test_kronecker_sum_helpers_agree():
    rng = np.random.default_rng(3)
    a, b, c = rc(rng, 2, 2), rc(rng, 3, 3), rc(rng, 2, 2)
    np.testing.assert_array_equal(kronecker_sum3(a, b, c), kronecker_sum(a, b, c))
