import numpy as np
import pytest

from symtoep.errors import InputError, SingularPreconditionerError, SizeCapError
from symtoep.multigrid import (MultigridPreconditioner, VCycleConfig, build_hierarchy,
                               galerkin_coeffs, prolong, restrict, spd_guard, vcycle_apply)
from symtoep.toeplitz import MultilevelToeplitzOperator, ToeplitzOperator


def tridiag(n):
    c = np.zeros(2 * n - 1)
    c[n - 2:n + 1] = [-1.0, 2.0, -1.0]
    return ToeplitzOperator(c)


def transfer_matrices(n):
    nc = (n - 1) // 2
    P = np.column_stack([prolong(e, (nc,)) for e in np.eye(nc)])
    R = np.column_stack([restrict(e, (n,)) for e in np.eye(n)])
    return P, R


def test_hierarchy_sizes():
    h = build_hierarchy(tridiag(15), VCycleConfig(coarsest_size=3))
    assert h.sizes == [15, 7, 3]


def test_transfer_operators():
    P, R = transfer_matrices(7)
    assert np.allclose(P[:, 0], [0.5, 1, 0.5, 0, 0, 0, 0])
    assert np.allclose(R, 0.5 * P.T)


def test_galerkin_laplacian():
    # R A P for the 1D Laplacian is (1/4)(-1, 2, -1)
    coarse = galerkin_coeffs(tridiag(7).coeffs)
    assert np.allclose(coarse, [0, -0.25, 0.5, -0.25, 0])


def test_galerkin_matches_dense_products(rng):
    n = 15
    T = ToeplitzOperator(rng.standard_normal(2 * n - 1))
    P, R = transfer_matrices(n)
    coarse = ToeplitzOperator(galerkin_coeffs(T.coeffs))
    assert np.allclose(coarse.dense(), R @ T.dense() @ P)


def test_galerkin_two_level(rng):
    ny, nx = 7, 15
    T = MultilevelToeplitzOperator(rng.standard_normal((2 * ny - 1, 2 * nx - 1)))
    Px, Rx = transfer_matrices(nx)
    Py, Ry = transfer_matrices(ny)
    P, R = np.kron(Py, Px), np.kron(Ry, Rx)
    coarse = MultilevelToeplitzOperator(galerkin_coeffs(T.coeffs))
    assert np.allclose(coarse.dense(), R @ T.dense() @ P)


def test_vcycle_is_linear(rng):
    h = build_hierarchy(tridiag(31), VCycleConfig(coarsest_size=7))
    x, y = rng.standard_normal(31), rng.standard_normal(31)
    lhs = vcycle_apply(h, 2.0 * x - 3.0 * y)
    assert np.allclose(lhs, 2.0 * vcycle_apply(h, x) - 3.0 * vcycle_apply(h, y))


def test_identity_single_sweep_is_exact(rng):
    c = np.zeros(61)
    c[30] = 1.0
    h = build_hierarchy(ToeplitzOperator(c),
                        VCycleConfig(pre_smooth=1, post_smooth=0, omega=1.0, coarsest_size=7))
    r = rng.standard_normal(31)
    assert np.allclose(vcycle_apply(h, r), r)


def test_symmetric_cycle_is_spd():
    h = build_hierarchy(tridiag(31), VCycleConfig(coarsest_size=7))
    assert spd_guard(h)
    assert MultigridPreconditioner(tridiag(31), VCycleConfig(coarsest_size=7)).is_symmetric


def test_unbalanced_cycle_not_symmetric():
    h = build_hierarchy(tridiag(31), VCycleConfig(pre_smooth=2, post_smooth=0, coarsest_size=7))
    assert not spd_guard(h)


def test_spd_guard_cap():
    h = build_hierarchy(tridiag(31), VCycleConfig(coarsest_size=7))
    with pytest.raises(SizeCapError):
        spd_guard(h, cap=16)


def test_transpose_cycle(rng):
    T = ToeplitzOperator(rng.standard_normal(61) + np.where(np.arange(61) == 30, 8.0, 0.0))
    mg = MultigridPreconditioner(T, VCycleConfig(pre_smooth=1, post_smooth=2, coarsest_size=7))
    M = np.column_stack([mg.solve(e) for e in np.eye(31)])
    Mt = np.column_stack([mg.solve_transpose(e) for e in np.eye(31)])
    assert np.allclose(Mt, M.T)


def test_vcycle_reduces_error():
    A = tridiag(63)
    h = build_hierarchy(A, VCycleConfig(omega=0.7, coarsest_size=7))
    rng = np.random.default_rng(0)
    x = rng.standard_normal(63)
    b = A.matvec(x)
    err = x - vcycle_apply(h, b)
    assert np.linalg.norm(err) < 0.5 * np.linalg.norm(x)


def test_config_and_size_validation():
    with pytest.raises(InputError):
        VCycleConfig(omega=1.5)
    with pytest.raises(InputError):
        VCycleConfig(pre_smooth=0, post_smooth=0)
    with pytest.raises(InputError):
        build_hierarchy(tridiag(16), VCycleConfig(coarsest_size=3))
    with pytest.raises(InputError):
        build_hierarchy(tridiag(7), VCycleConfig(coarsest_size=7))
    with pytest.raises(InputError):
        build_hierarchy(tridiag(15), VCycleConfig(dims_p=2))


def test_zero_operator_rejected():
    with pytest.raises(SingularPreconditionerError):
        build_hierarchy(ToeplitzOperator(np.zeros(29)), VCycleConfig(coarsest_size=3))
