"""Preconditioned MINRES, right-preconditioned GMRES and LSQR.

All three start from ``x0 = (1, ..., 1)^T / sqrt(n)`` unless told otherwise
and stop once the monitored relative residual drops below ``tol`` or after
``maxit`` iterations. ``residual_history[k]`` is the monitored residual after
``k`` iterations divided by its initial value.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InputError, SingularPreconditionerError

__all__ = [
    "LinearOperatorHandle",
    "PreconditionerHandle",
    "SolveReport",
    "as_operator",
    "as_preconditioner",
    "check_symmetric",
    "minres",
    "gmres_right",
    "lsqr",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class LinearOperatorHandle:
    size: int
    apply: Callable[[np.ndarray], np.ndarray]
    apply_transpose: Optional[Callable[[np.ndarray], np.ndarray]] = None
    symmetric: bool = False


@dataclass(frozen=True)
class PreconditionerHandle:
    """``solve(r)`` returns ``P^{-1} r``; ``spd`` marks it usable by MINRES."""

    size: int
    solve: Callable[[np.ndarray], np.ndarray]
    solve_transpose: Optional[Callable[[np.ndarray], np.ndarray]] = None
    spd: bool = False
    name: str = ""


@dataclass
class SolveReport:
    """Outcome of one solve.

    ``operator_applications`` and ``preconditioner_solves`` count the work
    done inside iterations (one each per MINRES/GMRES step, two each per
    LSQR step); setup products are not included.
    """

    x: np.ndarray = field(repr=False)
    iterations: int
    converged: bool
    flag: str
    residual_history: np.ndarray = field(repr=False)
    wall_seconds: float
    true_residual: float
    operator_applications: int = 0
    preconditioner_solves: int = 0


def as_operator(A, symmetric: Optional[bool] = None) -> LinearOperatorHandle:
    """Wrap a handle, dense array or object with ``matvec`` (and ``rmatvec``)."""
    if isinstance(A, LinearOperatorHandle):
        return A
    if isinstance(A, np.ndarray):
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InputError("dense operator must be square")
        sym = bool(np.array_equal(A, A.T)) if symmetric is None else symmetric
        return LinearOperatorHandle(A.shape[0], A.__matmul__, A.T.__matmul__, sym)
    if hasattr(A, "matvec"):
        rmat = getattr(A, "rmatvec", None)
        sym = bool(getattr(A, "is_symmetric", False)) if symmetric is None else symmetric
        return LinearOperatorHandle(A.shape[0], A.matvec, rmat, sym)
    raise InputError(f"cannot use {type(A).__name__} as a linear operator")


def as_preconditioner(P, size: int) -> PreconditionerHandle:
    """``None`` means identity; objects need ``solve`` (and ``solve_transpose``)."""
    if P is None:
        ident = np.array
        return PreconditionerHandle(size, ident, ident, True, "identity")
    if isinstance(P, PreconditionerHandle):
        if P.size != size:
            raise InputError(f"preconditioner size {P.size} != {size}")
        return P
    if hasattr(P, "solve"):
        spd = bool(getattr(P, "is_spd", False) or getattr(P, "is_symmetric", False))
        return PreconditionerHandle(size, P.solve, getattr(P, "solve_transpose", None), spd,
                                    type(P).__name__)
    raise InputError(f"cannot use {type(P).__name__} as a preconditioner")


def check_symmetric(A: LinearOperatorHandle, trials: int = 10, tol: float = 1e-10,
                    seed: int = 0) -> bool:
    """Test ``<Ax, y> == <x, Ay>`` on random pairs."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x, y = rng.standard_normal((2, A.size))
        lhs, rhs = A.apply(x) @ y, x @ A.apply(y)
        if abs(lhs - rhs) > tol * max(1.0, abs(lhs), abs(rhs)):
            return False
    return True


def _setup(A, b, x0):
    b = np.asarray(b, dtype=float)
    if b.shape != (A.size,):
        raise InputError(f"rhs length {b.shape} != operator size {A.size}")
    if x0 is None:
        x0 = np.ones(A.size) / np.sqrt(A.size)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != b.shape:
        raise InputError("x0 has the wrong length")
    return b, x0.copy()


def _true_residual(A, b, x, r0_norm):
    return float(np.linalg.norm(b - A.apply(x)) / r0_norm) if r0_norm > 0 else 0.0


def minres(A, b, P=None, x0=None, tol: float = 1e-8, maxit: int = 200,
           monitor: str = "true") -> SolveReport:
    """Preconditioned MINRES for symmetric ``A`` with SPD preconditioner ``P``.

    Parameters
    ----------
    monitor : {"true", "preconditioned"}
        ``"true"`` stops on ``||r_k||_2 / ||r_0||_2``, with the residual
        updated by recurrence (no extra products). ``"preconditioned"`` stops
        on ``||r_k||_{P^{-1}} / ||r_0||_{P^{-1}}``, the quantity MINRES
        minimises; that history is non-increasing for every SPD ``P``.
    """
    if monitor not in ("true", "preconditioned"):
        raise InputError(f"unknown monitor {monitor!r}")
    start = time.perf_counter()
    A = as_operator(A)
    M = as_preconditioner(P, A.size)
    b, x = _setup(A, b, x0)

    r1 = b - A.apply(x)
    r0_norm = np.linalg.norm(r1)
    y = M.solve(r1)
    beta1 = r1 @ y
    if beta1 < 0:
        raise SingularPreconditionerError("preconditioner is not positive definite")
    beta1 = np.sqrt(beta1)
    history = [1.0]
    if beta1 == 0.0:
        return SolveReport(x, 0, True, "converged", np.array(history),
                           time.perf_counter() - start, 0.0)

    oldb, beta, dbar, epsln, phibar = 0.0, beta1, 0.0, 0.0, beta1
    cs, sn = -1.0, 0.0
    w = np.zeros_like(b)
    w2 = np.zeros_like(b)
    aw = np.zeros_like(b)
    aw2 = np.zeros_like(b)
    res = r1.copy()
    r2 = r1
    flag = "maxit"
    for itn in range(1, maxit + 1):
        v = y / beta
        y = A.apply(v)
        av = y
        if itn >= 2:
            y = y - (beta / oldb) * r1
        alfa = v @ y
        y = y - (alfa / beta) * r2
        r1, r2 = r2, y
        y = M.solve(r2)
        oldb = beta
        beta_sq = r2 @ y
        if beta_sq < 0:
            raise SingularPreconditionerError("preconditioner is not positive definite")
        beta = np.sqrt(beta_sq)

        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(np.hypot(gbar, beta), _EPS)
        cs, sn = gbar / gamma, beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1, w2 = w2, w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w
        aw1, aw2 = aw2, aw
        aw = (av - oldeps * aw1 - delta * aw2) / gamma
        res = res - phi * aw

        if monitor == "true":
            history.append(np.linalg.norm(res) / r0_norm)
        else:
            history.append(phibar / beta1)
        if history[-1] < tol:
            flag = "converged"
            break
        if beta <= _EPS * beta1:
            flag = "breakdown"
            break

    its = len(history) - 1
    return SolveReport(x, its, flag == "converged", flag, np.array(history),
                       time.perf_counter() - start, _true_residual(A, b, x, r0_norm),
                       its, its)


def _mgs(V, w, k):
    h = np.empty(k)
    for i in range(k):
        h[i] = V[i] @ w
        w = w - h[i] * V[i]
    return h, w


def gmres_right(A, b, P=None, x0=None, tol: float = 1e-8, maxit: int = 200) -> SolveReport:
    """Full GMRES on ``A P^{-1} y = r_0``, ``x = x_0 + P^{-1} y``.

    Modified Gram-Schmidt, repeated once when the new basis vector has lost
    orthogonality beyond 1e-8.
    """
    start = time.perf_counter()
    A = as_operator(A)
    M = as_preconditioner(P, A.size)
    b, x = _setup(A, b, x0)

    r0 = b - A.apply(x)
    beta = np.linalg.norm(r0)
    history = [1.0]
    if beta == 0.0:
        return SolveReport(x, 0, True, "converged", np.array(history),
                           time.perf_counter() - start, 0.0)

    V = np.zeros((maxit + 1, A.size))
    H = np.zeros((maxit + 1, maxit))
    cs = np.zeros(maxit)
    sn = np.zeros(maxit)
    g = np.zeros(maxit + 1)
    g[0] = beta
    V[0] = r0 / beta
    flag = "maxit"
    k = 0
    for k in range(1, maxit + 1):
        j = k - 1
        w = A.apply(M.solve(V[j]))
        h, w = _mgs(V, w, k)
        hnorm = np.linalg.norm(w)
        if hnorm > 0 and np.max(np.abs(V[:k] @ w)) > 1e-8 * hnorm:
            h2, w = _mgs(V, w, k)
            h += h2
            hnorm = np.linalg.norm(w)
        H[:k, j] = h
        H[k, j] = hnorm
        for i in range(j):
            t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
            H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = t
        rho = np.hypot(H[j, j], H[k, j])
        cs[j], sn[j] = H[j, j] / rho, H[k, j] / rho
        H[j, j] = rho
        H[k, j] = 0.0
        g[k] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        history.append(abs(g[k]) / beta)
        if history[-1] < tol:
            flag = "converged"
            break
        if hnorm <= _EPS * beta:
            # happy breakdown: the Krylov space is invariant
            flag = "converged"
            break
        V[k] = w / hnorm

    y = np.linalg.solve(np.triu(H[:k, :k]), g[:k]) if k else np.zeros(0)
    x = x + M.solve(V[:k].T @ y)
    its = len(history) - 1
    return SolveReport(x, its, flag == "converged", flag, np.array(history),
                       time.perf_counter() - start, _true_residual(A, b, x, beta),
                       its, its)


def lsqr(A, b, P=None, x0=None, tol: float = 1e-8, maxit: int = 200) -> SolveReport:
    """LSQR on the right-preconditioned system ``A P^{-1} y = r_0``.

    Each iteration costs two operator products (``A``, ``A^T``) and two
    preconditioner solves (``P^{-1}``, ``P^{-T}``).
    """
    start = time.perf_counter()
    A = as_operator(A)
    M = as_preconditioner(P, A.size)
    if A.apply_transpose is None:
        raise InputError("LSQR needs the transpose of the operator")
    if M.solve_transpose is None:
        raise InputError("LSQR needs a transposed preconditioner solve")
    b, x = _setup(A, b, x0)

    r0 = b - A.apply(x)
    beta = np.linalg.norm(r0)
    history = [1.0]
    if beta == 0.0:
        return SolveReport(x, 0, True, "converged", np.array(history),
                           time.perf_counter() - start, 0.0)
    beta0 = beta
    u = r0 / beta
    v = M.solve_transpose(A.apply_transpose(u))
    alfa = np.linalg.norm(v)
    dy = np.zeros_like(b)
    flag = "maxit"
    if alfa == 0.0:
        flag = "breakdown"
    else:
        v = v / alfa
        w = v.copy()
        phibar, rhobar = beta, alfa
        for _ in range(maxit):
            u = A.apply(M.solve(v)) - alfa * u
            beta = np.linalg.norm(u)
            if beta > 0:
                u = u / beta
            vt = M.solve_transpose(A.apply_transpose(u)) - beta * v
            alfa = np.linalg.norm(vt)
            if alfa > 0:
                vt = vt / alfa

            rho = np.hypot(rhobar, beta)
            c, s = rhobar / rho, beta / rho
            theta = s * alfa
            rhobar = -c * alfa
            phi = c * phibar
            phibar = s * phibar
            dy = dy + (phi / rho) * w
            w = vt - (theta / rho) * w
            v = vt

            history.append(phibar / beta0)
            if history[-1] < tol:
                flag = "converged"
                break
            if alfa == 0.0 or beta == 0.0:
                flag = "breakdown"
                break
    x = x + M.solve(dy)
    its = len(history) - 1
    return SolveReport(x, its, flag == "converged", flag, np.array(history),
                       time.perf_counter() - start, _true_residual(A, b, x, beta0),
                       2 * its, 2 * its)
