"""Preconditioner factory keyed by the names used on the command line.

Every preconditioner exposes ``solve(r) = P^{-1} r``, ``solve_transpose`` and
an ``is_spd`` flag that MINRES relies on.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from . import circulant as circ
from .errors import ConfigError, SingularPreconditionerError, SizeCapError
from .multigrid import MultigridPreconditioner, VCycleConfig
from .problems import ProblemInstance, banded_Am
from .symbols import derive_views, fourier_coeffs
from .toeplitz import MultilevelToeplitzOperator, ToeplitzOperator, symmetric_part

__all__ = [
    "PRECONDITIONERS",
    "SPD_PRECONDITIONERS",
    "MGOverrides",
    "DenseCholesky",
    "BandedCholesky",
    "Identity",
    "mg_defaults",
    "make_preconditioner",
    "check_compatible",
]

_CIRC_KINDS = ("strang", "optimal", "superoptimal")
PRECONDITIONERS = (
    ("none", "ar", "am-exact", "am-banded")
    + tuple(f"circ-{k}" for k in _CIRC_KINDS)
    + tuple(f"circ-abs-{k}" for k in _CIRC_KINDS)
    + ("block-circ", "block-circ-abs", "mg-a", "mg-ar", "mg-am")
)
SPD_PRECONDITIONERS = frozenset(
    {"none", "ar", "am-exact", "am-banded", "block-circ-abs", "mg-ar", "mg-am"}
    | {f"circ-abs-{k}" for k in _CIRC_KINDS}
)
DENSE_FACTOR_CAP = 8192


@dataclass(frozen=True)
class MGOverrides:
    sweeps: Optional[int] = None
    omega: Optional[float] = None
    coarsest: Optional[int] = None


class Identity:
    is_spd = True

    def __init__(self, n: int):
        self.size = n

    def solve(self, r):
        return np.array(r)

    solve_transpose = solve


class DenseCholesky:
    """Exact solves with a dense SPD matrix."""

    is_spd = True

    def __init__(self, M: np.ndarray):
        try:
            self._factor = sla.cho_factor(M, lower=True)
        except np.linalg.LinAlgError as exc:
            raise SingularPreconditionerError("matrix is not positive definite") from exc
        self.size = M.shape[0]

    def solve(self, r):
        return sla.cho_solve(self._factor, r)

    solve_transpose = solve


class BandedCholesky:
    """Exact solves with a symmetric banded Toeplitz matrix (``bw`` off-diagonals)."""

    is_spd = True

    def __init__(self, T: ToeplitzOperator, bw: int):
        n = T.n
        ab = np.zeros((bw + 1, n))
        for k in range(bw + 1):
            ab[k, : n - k] = T.lag(k)
        try:
            self._cb = sla.cholesky_banded(ab, lower=True)
        except np.linalg.LinAlgError as exc:
            raise SingularPreconditionerError("banded matrix is not positive definite") from exc
        self.size = n
        self.bandwidth = bw

    def solve(self, r):
        return sla.cho_solve_banded((self._cb, True), r)

    solve_transpose = solve


def _bandwidth(T: ToeplitzOperator, tol: float = 0.0) -> int:
    a = np.abs(T.coeffs)
    lags = np.abs(np.arange(-T.n + 1, T.n))
    nz = lags[a > tol * a.max()]
    return int(nz.max()) if nz.size else 0


def _spd_solver(T: MultilevelToeplitzOperator):
    if T.p == 1:
        bw = _bandwidth(T)
        if bw <= max(8, T.n // 16):
            return BandedCholesky(T, bw)
    if T.size > DENSE_FACTOR_CAP:
        raise SizeCapError(f"dense factorisation of size {T.size} exceeds {DENSE_FACTOR_CAP}")
    return DenseCholesky(T.dense(DENSE_FACTOR_CAP))


def mg_defaults(example: str, precond: str, solver: str) -> VCycleConfig:
    """V-cycle settings that reproduce the reported experiments."""
    if example == "ex1":
        omega = {"gmres": 0.1, "lsqr": 0.4, "minres": 0.5}[solver]
        return VCycleConfig(2, 2, omega, 15, 1)
    if example == "ex2":
        sweeps = 1 if precond == "mg-am" else 2
        return VCycleConfig(sweeps, sweeps, 0.7, 127, 1)
    if example == "ex3":
        return VCycleConfig(4, 4, 0.9, 7, 2)
    raise ConfigError(f"unknown example {example!r}")


def _apply_overrides(cfg: VCycleConfig, mg: Optional[MGOverrides]) -> VCycleConfig:
    if mg is None:
        return cfg
    sweeps = cfg.pre_smooth if mg.sweeps is None else mg.sweeps
    post = cfg.post_smooth if mg.sweeps is None else mg.sweeps
    return VCycleConfig(sweeps, post,
                        cfg.omega if mg.omega is None else mg.omega,
                        cfg.coarsest_size if mg.coarsest is None else mg.coarsest,
                        cfg.dims_p)


def abs_toeplitz(problem: ProblemInstance) -> MultilevelToeplitzOperator:
    # A_n(|f|), via quadrature of the modulus
    views = derive_views(problem.symbol)
    dims = problem.dims if problem.operator.p > 1 else problem.dims[0]
    values = fourier_coeffs(views.abs, dims, use_analytic=False).values.real
    if problem.operator.is_real:
        # |f| is even for real operators; remove quadrature round-off asymmetry
        values = 0.5 * (values + values[(slice(None, None, -1),) * values.ndim])
    return type(problem.operator)(values, problem.dims)


def _am_banded(problem: ProblemInstance) -> ToeplitzOperator:
    meta = problem.metadata
    if meta.get("example") != "ex2":
        raise ConfigError("am-banded is defined for ex2 only")
    return banded_Am(derive_views(problem.symbol).abs, problem.size, meta["alpha"])


def check_compatible(solver: str, precond: str, example: str) -> None:
    """Raise ``ConfigError`` for combinations that cannot run."""
    if precond not in PRECONDITIONERS:
        raise ConfigError(f"unknown preconditioner {precond!r}")
    if solver not in ("minres", "gmres", "lsqr"):
        raise ConfigError(f"unknown solver {solver!r}")
    if solver == "minres" and precond not in SPD_PRECONDITIONERS:
        raise ConfigError(f"MINRES needs a symmetric positive definite preconditioner, "
                          f"{precond!r} is not")
    two_level = example == "ex3"
    if two_level and (precond.startswith("circ-") or precond in ("am-banded", "mg-am")):
        raise ConfigError(f"{precond!r} applies to one-level problems only")
    if not two_level and precond.startswith("block-circ"):
        raise ConfigError(f"{precond!r} applies to two-level problems only")
    if precond == "am-banded" and example != "ex2":
        raise ConfigError("am-banded is defined for ex2 only")


def make_preconditioner(precond: str, problem: ProblemInstance, solver: str = "minres",
                        mg: Optional[MGOverrides] = None):
    """Build preconditioner ``precond`` for ``problem``.

    Returns ``(preconditioner, setup_seconds)``.
    """
    example = problem.metadata.get("example", "")
    check_compatible(solver, precond, example)
    start = time.perf_counter()
    A = problem.operator
    if precond == "none":
        P = Identity(A.size)
    elif precond == "ar":
        P = _spd_solver(symmetric_part(A))
    elif precond == "am-exact":
        P = _spd_solver(abs_toeplitz(problem))
    elif precond == "am-banded":
        T = _am_banded(problem)
        P = BandedCholesky(T, T.bandwidth - 1)
    elif precond.startswith("circ-"):
        kind = precond.split("-")[-1]
        C = getattr(circ, kind)(A)
        P = C.absolute_value() if precond.startswith("circ-abs-") else C
    elif precond.startswith("block-circ"):
        ny, nx = problem.dims
        kind = "strang-abs" if precond == "block-circ-abs" else "strang-nonsym"
        P = circ.block2d(kind, problem.metadata["lx"], problem.metadata["ly"], (nx, ny))
    else:
        cfg = _apply_overrides(mg_defaults(example, precond, solver), mg)
        if precond == "mg-a":
            target = A
        elif precond == "mg-ar":
            target = symmetric_part(A)
        elif example == "ex2":
            target = _am_banded(problem)
        elif example == "ex1":
            target = abs_toeplitz(problem)
        else:
            raise ConfigError("mg-am is not available for two-level problems")
        P = MultigridPreconditioner(target, cfg)
        P.is_spd = precond != "mg-a" and P.is_symmetric
    return P, time.perf_counter() - start

