"""Geometric multigrid V-cycle for (multilevel) Toeplitz operators.

Transfer operators are linear (1D) or bilinear (2D) interpolation ``P`` and
full weighting ``R = P^T / 2`` per axis; coarse operators are Galerkin
products ``R A P``. For a Toeplitz ``A`` on ``2^k - 1`` points per axis the
product is again Toeplitz, with lag coefficients

    c_m = sum_d K_d a_{2m + d},   K = (1, 4, 6, 4, 1) / 8,

applied along every level, so each grid stays matrix-free and exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import InputError, SingularPreconditionerError, SizeCapError
from .toeplitz import MultilevelToeplitzOperator

__all__ = [
    "VCycleConfig",
    "GridHierarchy",
    "build_hierarchy",
    "vcycle_apply",
    "spd_guard",
    "galerkin_coeffs",
    "restrict",
    "prolong",
    "MultigridPreconditioner",
]

_GALERKIN_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 8.0


@dataclass(frozen=True)
class VCycleConfig:
    pre_smooth: int = 2
    post_smooth: int = 2
    omega: float = 0.7
    coarsest_size: int = 127
    dims_p: int = 1

    def __post_init__(self):
        if self.pre_smooth < 0 or self.post_smooth < 0 or self.pre_smooth + self.post_smooth < 1:
            raise InputError("need non-negative sweep counts with at least one sweep")
        if not 0.0 < self.omega <= 1.0:
            raise InputError(f"omega={self.omega} outside (0, 1]")
        if self.coarsest_size < 3:
            raise InputError("coarsest_size must be >= 3")
        if self.dims_p not in (1, 2):
            raise InputError("dims_p must be 1 or 2")


@dataclass
class Level:
    operator: MultilevelToeplitzOperator
    diagonal: float
    dims: tuple

    @property
    def size(self) -> int:
        return self.operator.size


@dataclass
class GridHierarchy:
    levels: list
    cfg: VCycleConfig
    coarse_lu: tuple = field(repr=False)
    coarse_lu_T: tuple = field(default=None, repr=False)

    @property
    def sizes(self) -> list:
        return [lv.size for lv in self.levels]

    @property
    def dims(self) -> list:
        return [lv.dims for lv in self.levels]


def _is_mersenne(n: int) -> bool:
    return n >= 3 and (n + 1) & n == 0


def galerkin_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of ``R A P`` from those of ``A`` (every axis coarsened)."""
    out = np.asarray(coeffs)
    for axis in range(out.ndim):
        ext = out.shape[axis]          # 2n - 1 with n = 2 nc + 1
        nc = (ext + 1) // 4
        length = 2 * nc - 1
        acc = 0.0
        for d, w in zip(range(-2, 3), _GALERKIN_KERNEL):
            start = 2 + d
            idx = np.arange(start, start + 2 * length - 1, 2)
            acc = acc + w * np.take(out, idx, axis=axis)
        out = acc
    return out


def restrict(r: np.ndarray, dims: tuple) -> np.ndarray:
    """Full weighting ``(1/4)(1, 2, 1)`` along each axis."""
    R = r.reshape(dims)
    for axis in range(R.ndim):
        R = np.moveaxis(R, axis, 0)
        R = 0.25 * (R[0:-2:2] + 2.0 * R[1::2] + R[2::2])
        R = np.moveaxis(R, 0, axis)
    return R.ravel()


def prolong(e: np.ndarray, coarse_dims: tuple) -> np.ndarray:
    """Linear / bilinear interpolation, stencil ``(1/2, 1, 1/2)`` per axis."""
    E = e.reshape(coarse_dims)
    for axis in range(E.ndim):
        E = np.moveaxis(E, axis, 0)
        nc = E.shape[0]
        F = np.zeros((2 * nc + 1,) + E.shape[1:], dtype=E.dtype)
        F[1::2] = E
        F[0:-1:2] += 0.5 * E
        F[2::2] += 0.5 * E
        E = np.moveaxis(F, 0, axis)
    return E.ravel()


def build_hierarchy(A: MultilevelToeplitzOperator, cfg: VCycleConfig) -> GridHierarchy:
    """Galerkin hierarchy down to the first grid with every axis ``<= coarsest_size``."""
    if not isinstance(A, MultilevelToeplitzOperator):
        raise InputError("multigrid needs a (multilevel) Toeplitz operator")
    if A.p != cfg.dims_p:
        raise InputError(f"operator has {A.p} levels, config expects {cfg.dims_p}")
    if not all(_is_mersenne(n) for n in A.dims):
        raise InputError(f"grid sizes {A.dims} must be 2^k - 1 per axis")
    if max(A.dims) <= cfg.coarsest_size:
        raise InputError(f"finest grid {A.dims} is not larger than coarsest_size")

    levels = [Level(A, float(np.real(A.lag(*([0] * A.p)))), A.dims)]
    while max(levels[-1].dims) > cfg.coarsest_size:
        fine = levels[-1]
        if min(fine.dims) < 3:
            raise InputError(f"cannot coarsen grid {fine.dims} further")
        coarse_op = type(A)(galerkin_coeffs(fine.operator.coeffs),
                            tuple((n - 1) // 2 for n in fine.dims))
        levels.append(Level(coarse_op, float(np.real(coarse_op.lag(*([0] * A.p)))),
                            coarse_op.dims))
    for lv in levels[:-1]:
        if lv.diagonal == 0.0:
            raise SingularPreconditionerError("zero diagonal; Jacobi smoothing undefined")

    dense = levels[-1].operator.dense()
    lu, piv = sla.lu_factor(dense, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= 1e-14 * max(pivots.max(), 1e-300):
        raise SingularPreconditionerError("coarsest-grid matrix is singular")
    return GridHierarchy(levels, cfg, (lu, piv))


def vcycle_apply(h: GridHierarchy, r, transpose: bool = False) -> np.ndarray:
    """One V-cycle from a zero initial guess, i.e. ``z = M^{-1} r``.

    With ``transpose=True`` applies ``M^{-T}``: the cycle for ``A^T`` with
    the pre- and post-smoothing counts exchanged.
    """
    r = np.asarray(r)
    if r.shape != (h.levels[0].size,):
        raise InputError(f"residual length {r.shape} != {h.levels[0].size}")
    return _cycle(h, 0, r, transpose)


def _cycle(h: GridHierarchy, depth: int, r: np.ndarray, transpose: bool) -> np.ndarray:
    if depth == len(h.levels) - 1:
        return sla.lu_solve(h.coarse_lu, r, trans=1 if transpose else 0)
    level = h.levels[depth]
    op = level.operator.transpose() if transpose else level.operator
    cfg = h.cfg
    pre, post = (cfg.post_smooth, cfg.pre_smooth) if transpose else (cfg.pre_smooth, cfg.post_smooth)
    scale = cfg.omega / level.diagonal

    x = np.zeros_like(r)
    for sweep in range(pre):
        x = x + scale * (r - op.matvec(x)) if sweep else scale * r
    res = r - op.matvec(x)
    coarse = h.levels[depth + 1]
    x = x + prolong(_cycle(h, depth + 1, restrict(res, level.dims), transpose), coarse.dims)
    for _ in range(post):
        x = x + scale * (r - op.matvec(x))
    return x


def spd_guard(h: GridHierarchy, cap: int = 2048, sym_tol: float = 1e-8) -> bool:
    """Assemble the V-cycle operator and test symmetry plus Cholesky."""
    n = h.levels[0].size
    if n > cap:
        raise SizeCapError(f"spd_guard limited to {cap} unknowns, got {n}")
    M = np.column_stack([vcycle_apply(h, e) for e in np.eye(n)])
    scale = max(np.max(np.abs(M)), 1e-300)
    if np.max(np.abs(M - M.T)) > sym_tol * scale:
        return False
    try:
        np.linalg.cholesky(0.5 * (M + M.T))
    except np.linalg.LinAlgError:
        return False
    return True


class MultigridPreconditioner:
    """One V-cycle as a preconditioner ``P^{-1}`` (fixed linear operator)."""

    def __init__(self, A: MultilevelToeplitzOperator, cfg: VCycleConfig):
        self.hierarchy = build_hierarchy(A, cfg)
        self.size = A.size
        self.shape = (A.size, A.size)
        # symmetric operator + symmetric cycle gives a symmetric preconditioner
        self.is_symmetric = A.is_symmetric and cfg.pre_smooth == cfg.post_smooth

    def solve(self, r):
        return vcycle_apply(self.hierarchy, r)

    def solve_transpose(self, r):
        return vcycle_apply(self.hierarchy, r, transpose=True)
