import numpy as np
import pytest
import scipy.sparse.linalg as spla
from hypothesis import given, strategies as st

from symtoep.errors import InputError, SingularPreconditionerError
from symtoep.krylov import (LinearOperatorHandle, PreconditionerHandle, as_operator,
                            check_symmetric, gmres_right, lsqr, minres)


class DensePrecond:
    def __init__(self, M):
        self.M = M
        self.is_spd = bool(np.allclose(M, M.T) and np.all(np.linalg.eigvalsh(0.5 * (M + M.T)) > 0))

    def solve(self, r):
        return np.linalg.solve(self.M, r)

    def solve_transpose(self, r):
        return np.linalg.solve(self.M.T, r)


def spd_matrix(rng, n, cond=50.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (Q * np.linspace(1.0, cond, n)) @ Q.T


@pytest.mark.parametrize("solver", [minres, gmres_right, lsqr])
def test_identity_one_iteration(solver, rng):
    b = rng.standard_normal(20)
    rep = solver(np.eye(20), b)
    assert rep.converged and rep.iterations <= 1
    assert np.allclose(rep.x, b)


def test_two_eigenvalues_two_iterations(rng):
    A = np.diag(np.where(np.arange(30) % 2, 1.0, -1.0))
    b = rng.standard_normal(30)
    rep = minres(A, b)
    assert rep.converged and rep.iterations <= 2
    assert np.allclose(A @ rep.x, b)


@pytest.mark.parametrize("solver", [gmres_right, lsqr])
def test_exact_preconditioner_one_iteration(solver, rng):
    A = rng.standard_normal((25, 25)) + 6 * np.eye(25)
    rep = solver(A, rng.standard_normal(25), DensePrecond(A))
    assert rep.converged and rep.iterations <= 1


def test_minres_exact_spd_preconditioner(rng):
    A = spd_matrix(rng, 25)
    rep = minres(A, rng.standard_normal(25), DensePrecond(A))
    assert rep.converged and rep.iterations <= 1


def test_minres_matches_scipy(rng):
    n = 60
    A = spd_matrix(rng, n)
    A[0, 0] = -3.0  # indefinite but still symmetric
    A = 0.5 * (A + A.T)
    b = rng.standard_normal(n)
    ours = minres(A, b, tol=1e-10, maxit=n)
    ref, info = spla.minres(A, b, rtol=1e-12, maxiter=10 * n)
    assert info == 0
    assert np.allclose(ours.x, ref, atol=1e-6 * np.linalg.norm(ref))


def test_gmres_matches_scipy(rng):
    n = 40
    A = rng.standard_normal((n, n)) + 8 * np.eye(n)
    b = rng.standard_normal(n)
    ours = gmres_right(A, b, tol=1e-10, maxit=n)
    assert np.allclose(ours.x, np.linalg.solve(A, b), atol=1e-8)


def test_lsqr_matches_solution(rng):
    n = 40
    A = rng.standard_normal((n, n)) + 8 * np.eye(n)
    b = rng.standard_normal(n)
    ours = lsqr(A, b, tol=1e-10, maxit=4 * n)
    assert ours.converged
    assert np.allclose(ours.x, np.linalg.solve(A, b), atol=1e-7)


def test_minres_gmres_histories_agree_for_symmetric(rng):
    n = 50
    A = rng.standard_normal((n, n))
    A = A + A.T + 2 * np.eye(n)
    b = rng.standard_normal(n)
    m = minres(A, b, tol=1e-9, maxit=30)
    g = gmres_right(A, b, tol=1e-9, maxit=30)
    k = min(len(m.residual_history), len(g.residual_history))
    assert np.allclose(m.residual_history[:k], g.residual_history[:k], atol=1e-8)


def test_preconditioned_monitor_monotone(rng):
    n = 80
    A = rng.standard_normal((n, n))
    A = A + A.T
    P = DensePrecond(spd_matrix(rng, n, 5.0))
    rep = minres(A, rng.standard_normal(n), P, monitor="preconditioned", maxit=60)
    h = rep.residual_history
    assert np.all(np.diff(h) <= 1e-12)


def test_true_monitor_reports_true_norm(rng):
    n = 80
    A = spd_matrix(rng, n, 200.0)
    P = DensePrecond(np.diag(np.diag(A)) + 0.1 * np.eye(n))
    b = rng.standard_normal(n)
    rep = minres(A, b, P, tol=1e-8)
    x0 = np.ones(n) / np.sqrt(n)
    direct = np.linalg.norm(b - A @ rep.x) / np.linalg.norm(b - A @ x0)
    assert rep.residual_history[-1] == pytest.approx(direct, rel=1e-4, abs=1e-12)
    assert rep.true_residual < 1e-8


def test_minres_indefinite_preconditioner_raises(rng):
    n = 10
    A = spd_matrix(rng, n)
    bad = PreconditionerHandle(n, lambda r: -r, spd=True)
    with pytest.raises(SingularPreconditionerError):
        minres(A, rng.standard_normal(n), bad)


def test_minres_rejects_bad_monitor():
    with pytest.raises(InputError):
        minres(np.eye(3), np.ones(3), monitor="other")


def test_rhs_length_checked():
    with pytest.raises(InputError):
        gmres_right(np.eye(3), np.ones(4))


def test_maxit_flag(rng):
    A = spd_matrix(rng, 100, 1e4)
    rep = gmres_right(A, rng.standard_normal(100), maxit=3)
    assert not rep.converged and rep.flag == "maxit" and rep.iterations == 3


def test_cost_accounting(rng):
    A = rng.standard_normal((30, 30)) + 5 * np.eye(30)
    b = rng.standard_normal(30)
    g = gmres_right(A, b)
    assert g.operator_applications == g.iterations == g.preconditioner_solves
    q = lsqr(A, b)
    assert q.operator_applications == 2 * q.iterations == q.preconditioner_solves
    assert g.iterations == len(g.residual_history) - 1


def test_deterministic(rng):
    A = rng.standard_normal((40, 40)) + 6 * np.eye(40)
    b = rng.standard_normal(40)
    r1, r2 = gmres_right(A, b), gmres_right(A, b)
    assert np.array_equal(r1.x, r2.x)
    assert np.array_equal(r1.residual_history, r2.residual_history)


def test_operator_wrapping_and_symmetry_check(rng):
    S = spd_matrix(rng, 12)
    assert check_symmetric(as_operator(S))
    N = rng.standard_normal((12, 12))
    assert not check_symmetric(as_operator(N))
    handle = LinearOperatorHandle(12, lambda x: S @ x, lambda x: S.T @ x, True)
    assert as_operator(handle) is handle


@given(st.integers(2, 40), st.integers(0, 2 ** 32 - 1))
def test_finite_termination(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + 2 * np.sqrt(n) * np.eye(n)
    S = A + A.T
    b = rng.standard_normal(n)
    for solver, M in ((minres, S), (gmres_right, A), (lsqr, A)):
        rep = solver(M, b, tol=1e-10, maxit=n + 1)
        assert rep.converged, (solver.__name__, rep.flag)


@given(st.integers(3, 40), st.integers(0, 2 ** 32 - 1))
def test_gmres_history_monotone(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + np.sqrt(n) * np.eye(n)
    rep = gmres_right(A, rng.standard_normal(n), tol=1e-12, maxit=n + 1)
    assert np.all(np.diff(rep.residual_history) <= 1e-12)
