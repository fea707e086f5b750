import math

import numpy as np
import pytest
import scipy.linalg as sla

from symtoep.errors import InputError
from symtoep.problems import (banded_Am, banded_Am_width, example1, example2, example3,
                              grunwald, random_rhs)
from symtoep.symbols import derive_views, epsilon_bound, fourier_coeffs, sample_grid
from symtoep.toeplitz import symmetric_part


def test_grunwald_alpha2():
    assert np.allclose(grunwald(2.0, 5).values, [1, -2, 1, 0, 0, 0])


@pytest.mark.parametrize("alpha", [1.25, 1.5, 1.75])
def test_grunwald_basic(alpha):
    g = grunwald(alpha, 10_000).values
    assert g[0] == 1 and g[1] == -alpha
    assert np.all(g[2:] > 0)
    assert abs(g.sum()) < 1e-3
    partial = np.abs(np.cumsum(g)[1:])
    assert np.all(np.diff(partial) <= 1e-15)


def test_grunwald_direct_product():
    assert grunwald(1.5, 2)[2] == pytest.approx(0.375)


def test_grunwald_domain():
    with pytest.raises(InputError):
        grunwald(2.5, 4)
    with pytest.raises(InputError):
        grunwald(1.5, 0)


def test_example1_structure():
    prob = example1(64)
    AR = symmetric_part(prob.operator)
    assert np.allclose(AR.lag(0), 2.0) and np.allclose(AR.lag(1), -1.0)
    assert np.allclose(AR.coeffs[:61], 0.0, atol=1e-12)
    v = derive_views(prob.symbol)
    assert epsilon_bound(v.imag, v.real) == pytest.approx(np.pi, rel=1e-3)
    assert prob.rhs.shape == (64,)


def test_random_rhs_reproducible():
    assert np.array_equal(random_rhs(50, 3), random_rhs(50, 3))
    assert not np.array_equal(random_rhs(50, 3), random_rhs(50, 4))
    u = random_rhs(1000, 0)
    assert u.min() >= 0 and u.max() < 1
    assert abs(random_rhs(1000, 0, "normal").mean()) < 0.2
    with pytest.raises(InputError):
        random_rhs(10, 0, "cauchy")


def lower_hessenberg(alpha, n):
    g = grunwald(alpha, n + 1).values
    L = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i - j >= -1:
                L[i, j] = -g[i - j + 1]
    return L


def test_example2_dense_assembly():
    n, alpha, dp, dm = 8, 1.5, 0.5, 1.0
    prob = example2(n, alpha, dp, dm)
    nu = prob.metadata["nu"]
    assert prob.metadata["tau"] == 1.0 / math.ceil(n ** alpha)
    assert prob.metadata["h"] == 1.0 / (n + 1)
    L = lower_hessenberg(alpha, n)
    ref = nu * np.eye(n) + dp * L + dm * L.T
    assert np.allclose(prob.operator.dense(), ref, atol=1e-14)
    x = prob.metadata["h"] * np.arange(1, n + 1)
    assert np.allclose(prob.rhs, nu * 80 * np.sin(20 * x) * np.cos(10 * x))


def test_example2_symmetric_when_weights_equal():
    c = example2(32, 1.5, 1.0, 1.0).operator.coeffs
    assert np.allclose(c, c[::-1], atol=1e-14)


@pytest.mark.parametrize("alpha", [1.25, 1.5, 1.75])
@pytest.mark.parametrize("n", [15, 63, 1023])
def test_example2_symbol_consistency(n, alpha):
    prob = example2(n, alpha, 0.5, 1.0)
    quad = fourier_coeffs(prob.symbol, n, use_analytic=False).values
    assert np.max(np.abs(quad - prob.operator.coeffs)) < 1e-10


def test_example2_symmetric_part_positive_definite():
    AR = symmetric_part(example2(255, 1.75, 0.5, 1.0).operator).dense()
    sla.cholesky(AR)


def test_example2_domain():
    with pytest.raises(InputError):
        example2(16, 2.0, 1.0, 1.0)
    with pytest.raises(InputError):
        example2(16, 1.5, 0.0, 0.0)
    with pytest.raises(InputError):
        example2(4, 1.5, 1.0, 1.0)


def test_example3_kronecker_assembly():
    n, alpha, beta = 7, 1.5, 1.75
    dp, dm, ep, em = 2.0, 0.5, 0.3, 1.0
    prob = example3(n, alpha, beta, dp, dm, ep, em)
    tau = 1.0 / math.ceil(n ** alpha)
    h = 1.0 / (n + 1)
    Lx = tau / h ** alpha * -(dp * lower_hessenberg(alpha, n) + dm * lower_hessenberg(alpha, n).T)
    Ly = tau / h ** beta * -(ep * lower_hessenberg(beta, n) + em * lower_hessenberg(beta, n).T)
    I = np.eye(n)
    ref = np.eye(n * n) - np.kron(I, Lx) - np.kron(Ly, I)
    assert np.allclose(prob.operator.dense(), ref, atol=1e-12)


def test_example3_axis_swap_invariance():
    prob = example3(7, 1.5, 1.5, 1.0, 1.0, 1.0, 1.0)
    A = prob.operator.dense()
    perm = np.arange(49).reshape(7, 7).T.ravel()
    assert np.allclose(A[np.ix_(perm, perm)], A, atol=1e-12)
    assert np.allclose(A, A.T, atol=1e-12)


def test_example3_symbol_consistency():
    prob = example3(15, 1.5, 1.75, 2.0, 0.5, 0.3, 1.0)
    # two-variable grids stay coarse, so the tolerance is looser than in 1D
    quad = fourier_coeffs(prob.symbol, prob.dims, oversample=64, use_analytic=False).values
    assert np.max(np.abs(quad - prob.operator.coeffs)) < 1e-7


@pytest.mark.parametrize("prob", [example1(16), example2(31, 1.5, 0.5, 1.0),
                                  example3(7, 1.5, 1.75, 2.0, 0.5, 0.3, 1.0)],
                         ids=["ex1", "ex2", "ex3"])
def test_real_part_positive_off_origin(prob):
    fr = derive_views(prob.symbol).real
    t = sample_grid(256)
    t = t[t != 0.0]
    grids = np.meshgrid(*([t] * fr.dim), indexing="ij")
    assert np.all(fr(*grids).real > 0)


def test_banded_widths():
    assert banded_Am_width(1023, 1.25) == 50
    assert banded_Am_width(1023, 1.5) == 104


def test_banded_full_band_equals_exact():
    prob = example2(31, 1.5, 0.5, 1.0)
    sym_abs = derive_views(prob.symbol).abs
    with pytest.warns(RuntimeWarning):
        op = banded_Am(sym_abs, 31, 1.5)
    full = fourier_coeffs(sym_abs, 31, use_analytic=False).values
    assert op.bandwidth == 31
    assert np.allclose(op.coeffs, full.real)


def test_banded_truncates():
    prob = example2(255, 1.25, 0.5, 1.0)
    op = banded_Am(derive_views(prob.symbol).abs, 255, 1.25)
    lags = np.arange(-254, 255)
    assert np.all(op.coeffs[np.abs(lags) >= 50] == 0)
    assert np.any(op.coeffs[np.abs(lags) == 49] != 0)
