import numpy as np
import pytest
from hypothesis import given, strategies as st

from symtoep.circulant import (BlockCirculant2D, CirculantOperator, block2d, optimal,
                               sampled_circulant, strang, superoptimal)
from symtoep.errors import InputError, SingularPreconditionerError
from symtoep.symbols import trig_polynomial
from symtoep.toeplitz import ToeplitzOperator


def tridiag(n):
    c = np.zeros(2 * n - 1)
    c[n - 2:n + 1] = [-1.0, 2.0, -1.0]
    return ToeplitzOperator(c)


def test_strang_tridiagonal_n4():
    C = strang(tridiag(4))
    assert np.allclose(C.first_column, [2, -1, 0, -1])
    assert np.allclose(np.sort(C.eigs.real), [0, 2, 2, 4])
    assert np.allclose(C.eigs.real, [0, 2, 4, 2])


def test_singular_strang_solve_raises():
    with pytest.raises(SingularPreconditionerError):
        strang(tridiag(4)).solve(np.ones(4))


def test_optimal_tridiagonal_n4():
    assert np.allclose(optimal(tridiag(4)).first_column, [2, -0.75, 0, -0.75])


def test_optimal_minimises_frobenius(rng):
    n = 8
    T = ToeplitzOperator(rng.standard_normal(2 * n - 1))
    C = optimal(T)
    base = np.linalg.norm(C.dense() - T.dense())
    for _ in range(5):
        other = CirculantOperator.from_first_column(
            C.first_column + 0.01 * rng.standard_normal(n))
        assert np.linalg.norm(other.dense() - T.dense()) > base


def test_superoptimal_reproduces_circulant(rng):
    n = 7
    col = rng.standard_normal(n)
    col[0] += 10.0
    dense = CirculantOperator.from_first_column(col).dense()
    # Toeplitz lags of a circulant: a_j = col[j mod n]
    lags = np.arange(-n + 1, n)
    T = ToeplitzOperator(col[lags % n])
    assert np.allclose(T.dense(), dense)
    assert np.allclose(superoptimal(T).first_column, col)


def test_superoptimal_beats_optimal(rng):
    n = 10
    c = rng.standard_normal(2 * n - 1)
    c[n - 1] += 6.0
    T = ToeplitzOperator(c)
    A = T.dense()

    def defect(C):
        return np.linalg.norm(np.eye(n) - np.linalg.solve(C.dense(), A))

    assert defect(superoptimal(T)) <= defect(optimal(T)) + 1e-12


def test_apply_solve_roundtrip(rng):
    col = rng.standard_normal(9)
    col[0] += 5
    C = CirculantOperator.from_first_column(col)
    x = rng.standard_normal(9)
    assert np.allclose(C.apply(x), C.dense() @ x)
    assert np.allclose(C.apply(C.solve(x)), x)
    assert np.allclose(C.dense().T @ C.solve_transpose(x), x)


def test_absolute_value_is_spd():
    C = CirculantOperator.from_first_column([1.0, 3.0, 0.5, -2.0])
    assert C.absolute_value().is_spd
    assert np.allclose(np.abs(C.absolute_value().eigs), np.abs(C.eigs))


def test_sampled_circulant_eigs():
    f = trig_polynomial({0: 2.0, 1: -1.0, -1: -1.0})
    C = sampled_circulant(f, 6)
    theta = 2 * np.pi * np.arange(6) / 6
    assert np.allclose(C.eigs, 2 - 2 * np.cos(theta))


def test_eigs_validation():
    with pytest.raises(InputError):
        CirculantOperator(np.zeros((2, 2)))
    with pytest.raises(InputError):
        strang(ToeplitzOperator([1.0]))


def test_block_circulant_matches_kron(rng):
    nx, ny = 5, 4
    lx = rng.standard_normal(2 * nx - 1)
    ly = rng.standard_normal(2 * ny - 1)
    lx[nx - 1] -= 10.0
    ly[ny - 1] -= 10.0
    bc = block2d("strang-nonsym", lx, ly, (nx, ny))
    Cx = strang(ToeplitzOperator(lx)).dense()
    Cy = strang(ToeplitzOperator(ly)).dense()
    ref = np.eye(nx * ny) - np.kron(np.eye(ny), Cx) - np.kron(Cy, np.eye(nx))
    x = rng.standard_normal(nx * ny)
    assert np.allclose(bc.apply(x), ref @ x)
    assert np.allclose(ref @ bc.solve(x), x)
    assert np.allclose(ref.T @ bc.solve_transpose(x), x)


def test_block_circulant_abs_spd(rng):
    bc = block2d("strang-abs", rng.standard_normal(7), rng.standard_normal(5), (4, 3))
    assert bc.is_spd
    assert np.all(bc.eigs.real >= 1.0)
    with pytest.raises(InputError):
        BlockCirculant2D((4, 3), bc.eigs_x, bc.eigs_y, "other")


@given(st.integers(2, 40), st.integers(0, 2 ** 32 - 1))
def test_strang_eigs_match_symbol_of_kept_lags(n, seed):
    rng = np.random.default_rng(seed)
    T = ToeplitzOperator(rng.standard_normal(2 * n - 1))
    C = strang(T)
    col = C.first_column
    assert np.allclose(C.eigs, n * np.fft.ifft(col))
    # kept lags are copied verbatim
    for j in range(n // 2 + 1):
        assert np.isclose(col[j], T.lag(j))
