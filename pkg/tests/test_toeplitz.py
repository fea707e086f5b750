import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from symtoep.errors import InputError, SizeCapError
from symtoep.symbols import FourierCoefficients
from symtoep.toeplitz import (MultilevelToeplitzOperator, ToeplitzOperator, flip, from_coeffs,
                              materialize_dense, symmetric_part, symmetrized_apply)


def tridiag(n):
    c = np.zeros(2 * n - 1)
    c[n - 2:n + 1] = [-1.0, 2.0, -1.0]
    return ToeplitzOperator(c)


def test_tridiagonal_times_ones():
    assert np.allclose(tridiag(5).matvec(np.ones(5)), [1, 0, 0, 0, 1])


def test_flip_reverses_two_level_vector():
    x = np.arange(6.0)
    assert np.array_equal(flip((2, 3), x), x[::-1])


def test_flip_length_checked():
    with pytest.raises(InputError):
        flip((2, 3), np.arange(5.0))


def test_from_coeffs_layout():
    coeffs = FourierCoefficients((3,), np.array([5.0, 4.0, 1.0, 2.0, 3.0]))
    D = from_coeffs(coeffs).dense()
    # entry (i, j) = a_{i-j}; a_{-2}=5, a_{-1}=4, a_0=1, a_1=2, a_2=3
    assert np.array_equal(D, [[1, 4, 5], [2, 1, 4], [3, 2, 1]])


def test_matches_scipy_toeplitz(rng):
    n = 9
    c = rng.standard_normal(2 * n - 1)
    T = ToeplitzOperator(c)
    ref = sla.toeplitz(c[n - 1:], c[n - 1::-1])
    x = rng.standard_normal(n)
    assert np.allclose(T.matvec(x), ref @ x)
    assert np.allclose(T.dense(), ref)
    assert np.allclose(T.rmatvec(x), ref.T @ x)


def test_complex_coefficients(rng):
    n = 6
    c = rng.standard_normal(2 * n - 1) + 1j * rng.standard_normal(2 * n - 1)
    T = ToeplitzOperator(c)
    x = rng.standard_normal(n)
    ref = sla.toeplitz(c[n - 1:], c[n - 1::-1])
    assert np.allclose(T.matvec(x), ref @ x)


def test_two_level_matches_kronecker(rng):
    ny, nx = 3, 4
    lx = rng.standard_normal(2 * nx - 1)
    ly = rng.standard_normal(2 * ny - 1)
    coeffs = np.zeros((2 * ny - 1, 2 * nx - 1))
    coeffs[ny - 1, :] += lx
    coeffs[:, nx - 1] += ly
    T = MultilevelToeplitzOperator(coeffs, (ny, nx))
    Tx = sla.toeplitz(lx[nx - 1:], lx[nx - 1::-1])
    Ty = sla.toeplitz(ly[ny - 1:], ly[ny - 1::-1])
    ref = np.kron(np.eye(ny), Tx) + np.kron(Ty, np.eye(nx))
    assert np.allclose(T.dense(), ref)


def test_symmetric_part():
    c = np.array([0.0, 1.0, 4.0, 3.0, 2.0])
    S = symmetric_part(ToeplitzOperator(c))
    assert np.allclose(S.coeffs, [1.0, 2.0, 4.0, 2.0, 1.0])
    assert S.is_symmetric


def test_symmetrized_apply_is_symmetric(rng):
    n = 7
    T = ToeplitzOperator(rng.standard_normal(2 * n - 1))
    H = np.column_stack([symmetrized_apply(T, e) for e in np.eye(n)])
    assert np.allclose(H, H.T)


def test_dense_cap():
    with pytest.raises(SizeCapError):
        materialize_dense(tridiag(10), cap=5)


def test_bad_extents():
    with pytest.raises(InputError):
        MultilevelToeplitzOperator(np.ones(4))
    with pytest.raises(InputError):
        tridiag(3).matvec(np.ones(4))


@given(st.integers(1, 30), st.integers(0, 2 ** 32 - 1))
def test_fft_product_matches_dense(n, seed):
    rng = np.random.default_rng(seed)
    T = ToeplitzOperator(rng.standard_normal(2 * n - 1))
    x = rng.standard_normal(n)
    assert np.allclose(T.matvec(x), T.dense() @ x, atol=1e-10)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_flip_of_hankel_symmetric_two_level(ny, nx, seed):
    rng = np.random.default_rng(seed)
    T = MultilevelToeplitzOperator(rng.standard_normal((2 * ny - 1, 2 * nx - 1)))
    D = T.dense()
    assert np.allclose(D[::-1], D[::-1].T)
