"""Test problems: a nonsymmetric Toeplitz model problem and fractional diffusion.

* ``example1``: Toeplitz matrix of ``f(t) = (2 - 2cos t)(1 + i t)``.
* ``example2``: 1D space-fractional diffusion, shifted Grunwald-Letnikov in
  space, backward Euler in time, first time step.
* ``example3``: the 2D analogue on an ``n x n`` interior grid.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .symbols import Symbol, fourier_coeffs
from .toeplitz import MultilevelToeplitzOperator, ToeplitzOperator

__all__ = [
    "GrunwaldCoeffs",
    "ProblemInstance",
    "grunwald",
    "fractional_symbol",
    "example1_symbol",
    "example2_symbol",
    "example1",
    "example2",
    "example3",
    "banded_Am",
    "banded_Am_width",
    "random_rhs",
]


@dataclass(frozen=True)
class GrunwaldCoeffs:
    alpha: float
    values: np.ndarray = field(repr=False)

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


def grunwald(alpha: float, K: int) -> GrunwaldCoeffs:
    """Weights ``g_k = (-1)^k binom(alpha, k)`` for ``k = 0..K``.

    Uses ``g_0 = 1, g_k = g_{k-1} (1 - (alpha + 1) / k)``.
    """
    if not 0 < alpha <= 2:
        raise InputError(f"alpha={alpha} outside (0, 2]")
    if K < 1:
        raise InputError("K must be >= 1")
    k = np.arange(1, K + 1)
    values = np.empty(K + 1)
    values[0] = 1.0
    values[1:] = np.cumprod(1.0 - (alpha + 1.0) / k)
    values.setflags(write=False)
    return GrunwaldCoeffs(float(alpha), values)


def _lower_hessenberg_lags(alpha: float, lags: np.ndarray) -> np.ndarray:
    """Coefficients of ``L_alpha``: ``-g_{m+1}`` at lag ``m >= -1``, else 0."""
    lags = np.asarray(lags)
    top = int(lags.max()) + 1 if lags.size else 1
    g = grunwald(alpha, max(top, 1)).values
    out = np.zeros(lags.shape)
    mask = lags >= -1
    out[mask] = -g[lags[mask] + 1]
    return out


def _one_minus_exp_pow(theta, alpha):
    # principal branch of (1 - e^{i t})^alpha on [-pi, pi]; zero at t = 0
    theta = (np.asarray(theta, dtype=float) + np.pi) % (2 * np.pi) - np.pi
    mod = 2.0 * np.abs(np.sin(theta / 2.0))
    arg = theta / 2.0 - 0.5 * np.pi * np.sign(theta)
    return mod ** alpha * np.exp(1j * alpha * arg)


def fractional_symbol(alpha: float) -> Symbol:
    """``f_alpha(t) = -e^{-i t} (1 - e^{i t})^alpha``, the symbol of ``L_alpha``."""
    def func(t):
        return -np.exp(-1j * t) * _one_minus_exp_pow(t, alpha)

    def coeffs(j):
        return _lower_hessenberg_lags(alpha, j) + 0j

    return Symbol(func, 1, coeffs, name=f"f_{alpha:g}")


def _ex1_imag_lags(j):
    # Fourier coefficients of t -> t (2 - 2cos t), times i; the result is real and odd.
    # (1/2pi) int t e^{-imt} dt = i (-1)^m / m for m != 0.
    j = np.asarray(j)
    m = np.abs(j).astype(float)

    def gamma(k):
        safe = np.where(k == 0, 1.0, k)
        return np.where(k == 0, 0.0, np.where(np.abs(k) % 2 == 0, 1.0, -1.0) / safe)

    positive = -(2.0 * gamma(m) - gamma(m - 1) - gamma(m + 1))
    return np.sign(j) * positive


def example1_symbol() -> Symbol:
    def func(t):
        return (2.0 - 2.0 * np.cos(t)) * (1.0 + 1j * t)

    def coeffs(j):
        j = np.asarray(j)
        real = np.where(j == 0, 2.0, np.where(np.abs(j) == 1, -1.0, 0.0))
        return real + _ex1_imag_lags(j) + 0j

    def phase(t):
        return (1.0 + 1j * t) / np.sqrt(1.0 + t * t)

    return Symbol(func, 1, coeffs, phase=phase, name="(2-2cos t)(1+it)")


def _ex2_scaling(n: int, alpha: float):
    tau = 1.0 / math.ceil(n ** alpha)
    h = 1.0 / (n + 1)
    return tau, h, tau / h ** alpha


def example2_symbol(n: int, alpha: float, d_plus: float, d_minus: float) -> Symbol:
    """``phi(t) = nu + d_+ f_alpha(t) + d_- f_alpha(-t)`` with ``nu`` for size ``n``.

    Accepts ``alpha`` in [1, 2] so limiting cases can be tabulated.
    """
    if not 1.0 <= alpha <= 2.0:
        raise InputError(f"alpha={alpha} outside [1, 2]")
    _, _, nu = _ex2_scaling(n, alpha)
    fa = fractional_symbol(alpha)
    sym = nu + d_plus * fa + d_minus * fa.reflect()
    return Symbol(sym.func, 1, sym.analytic_coeffs,
                  name=f"phi(alpha={alpha:g}, d+={d_plus:g}, d-={d_minus:g})")


def random_rhs(n: int, seed: int, dist: str = "uniform") -> np.ndarray:
    """Reproducible random vector from the counter-based Philox generator.

    ``dist="uniform"`` draws from ``[0, 1)``; ``dist="normal"`` draws standard
    normals (numpy's ziggurat sampler).
    """
    rng = np.random.Generator(np.random.Philox(seed))
    if dist == "uniform":
        return rng.random(n)
    if dist == "normal":
        return rng.standard_normal(n)
    raise InputError(f"unknown rhs distribution {dist!r}")


@dataclass(frozen=True)
class ProblemInstance:
    """A ready-to-solve system ``A x = b`` plus its generating function."""

    operator: MultilevelToeplitzOperator
    rhs: np.ndarray = field(repr=False)
    symbol: Symbol
    metadata: dict

    @property
    def size(self) -> int:
        return self.operator.size

    @property
    def dims(self) -> tuple:
        return self.operator.dims


def example1(n: int, seed: int = 0, rhs_dist: str = "uniform") -> ProblemInstance:
    """Toeplitz system generated by ``(2 - 2cos t)(1 + i t)`` with a random rhs."""
    if n < 8:
        raise InputError("example1 needs n >= 8")
    sym = example1_symbol()
    op = ToeplitzOperator(fourier_coeffs(sym, n))
    return ProblemInstance(op, random_rhs(n, seed, rhs_dist), sym,
                           {"example": "ex1", "n": n, "seed": seed, "rhs_dist": rhs_dist})


def example2(n: int, alpha: float, d_plus: float, d_minus: float) -> ProblemInstance:
    """First backward-Euler step of the 1D fractional diffusion problem.

    ``A = nu I + d_+ L_alpha + d_- L_alpha^T``, ``b = nu u0`` (zero source),
    ``u0 = 80 sin(20x) cos(10x)`` at ``x_i = i h``.
    """
    if n < 8:
        raise InputError("example2 needs n >= 8")
    if not 1.0 < alpha < 2.0:
        raise InputError(f"alpha={alpha} outside (1, 2)")
    if d_plus < 0 or d_minus < 0 or d_plus == d_minus == 0:
        raise InputError("need d_+, d_- >= 0, not both zero")
    tau, h, nu = _ex2_scaling(n, alpha)
    lags = np.arange(-n + 1, n)
    coeffs = d_plus * _lower_hessenberg_lags(alpha, lags) \
        + d_minus * _lower_hessenberg_lags(alpha, -lags)
    coeffs[n - 1] += nu
    x = h * np.arange(1, n + 1)
    u0 = 80.0 * np.sin(20.0 * x) * np.cos(10.0 * x)
    meta = {"example": "ex2", "n": n, "alpha": alpha, "d_plus": d_plus,
            "d_minus": d_minus, "nu": nu, "tau": tau, "h": h}
    return ProblemInstance(ToeplitzOperator(coeffs), nu * u0,
                           example2_symbol(n, alpha, d_plus, d_minus), meta)


def _grunwald_difference(alpha, lags, w_plus, w_minus):
    # w_+ G + w_- G^T with G = -L_alpha, the Grunwald difference matrix
    return -(w_plus * _lower_hessenberg_lags(alpha, lags)
             + w_minus * _lower_hessenberg_lags(alpha, -lags))


def example3(n, alpha: float, beta: float, d_plus: float, d_minus: float,
             e_plus: float, e_minus: float) -> ProblemInstance:
    """First time step of the 2D fractional diffusion problem.

    ``A = I - I (x) L_x - L_y (x) I`` on an x-fastest grid, with
    ``L_x = (tau/h_x^alpha)(d_+ G_alpha + d_- G_alpha^T)`` where ``G_alpha``
    is the Grunwald difference matrix (so ``-L_x`` has positive diagonal),
    ``tau = 1/ceil(n_x^alpha)``; ``b = u0 = 100 sin(10x) cos(y)``.
    """
    nx, ny = (n, n) if np.isscalar(n) else (int(n[0]), int(n[1]))
    if min(nx, ny) < 7:
        raise InputError("example3 needs n >= 7 per axis")
    if not (1.0 < alpha < 2.0 and 1.0 < beta < 2.0):
        raise InputError("alpha and beta must lie in (1, 2)")
    tau = 1.0 / math.ceil(nx ** alpha)
    hx, hy = 1.0 / (nx + 1), 1.0 / (ny + 1)
    kx, ky = tau / hx ** alpha, tau / hy ** beta
    lx = kx * _grunwald_difference(alpha, np.arange(-nx + 1, nx), d_plus, d_minus)
    ly = ky * _grunwald_difference(beta, np.arange(-ny + 1, ny), e_plus, e_minus)

    coeffs = np.zeros((2 * ny - 1, 2 * nx - 1))
    coeffs[ny - 1, nx - 1] = 1.0
    coeffs[ny - 1, :] -= lx
    coeffs[:, nx - 1] -= ly
    op = MultilevelToeplitzOperator(coeffs, (ny, nx))

    fa, fb = fractional_symbol(alpha), fractional_symbol(beta)

    def func(ty, tx):
        sx = d_plus * fa.func(tx) + d_minus * fa.func(-tx)
        sy = e_plus * fb.func(ty) + e_minus * fb.func(-ty)
        return 1.0 + kx * sx + ky * sy

    def sym_coeffs(jy, jx):
        jy, jx = np.broadcast_arrays(np.asarray(jy), np.asarray(jx))
        out = np.where((jy == 0) & (jx == 0), 1.0, 0.0)
        out -= np.where(jy == 0, kx * _grunwald_difference(alpha, jx, d_plus, d_minus), 0.0)
        out -= np.where(jx == 0, ky * _grunwald_difference(beta, jy, e_plus, e_minus), 0.0)
        return out + 0j

    sym = Symbol(func, 2, sym_coeffs, name=f"ex3(alpha={alpha:g}, beta={beta:g})")
    x = hx * np.arange(1, nx + 1)
    y = hy * np.arange(1, ny + 1)
    u0 = 100.0 * np.sin(10.0 * x)[None, :] * np.cos(y)[:, None]
    meta = {"example": "ex3", "n": (nx, ny), "alpha": alpha, "beta": beta,
            "d_plus": d_plus, "d_minus": d_minus, "e_plus": e_plus, "e_minus": e_minus,
            "tau": tau, "h": (hx, hy), "lx": lx, "ly": ly}
    return ProblemInstance(op, u0.ravel(), sym, meta)


def banded_Am_width(n: int, alpha: float) -> int:
    """Number of leading row/column entries kept for the banded ``A_M``."""
    if alpha == 1.25:
        return 50
    scale = 100.0 if alpha == 1.75 else 40.0
    return math.ceil(scale * 1.1 ** math.log2(n + 1))


def banded_Am(sym_abs: Symbol, n: int, alpha: float, oversample: int = 8) -> ToeplitzOperator:
    """Banded Toeplitz approximation of ``A_n(|f|)``.

    Keeps the first ``B`` entries of the first row and column; ``B`` is 50
    for ``alpha = 1.25`` and ``ceil(s * 1.1^log2(n+1))`` otherwise, with
    ``s = 100`` for ``alpha = 1.75`` and ``s = 40`` for every other alpha.
    """
    width = banded_Am_width(n, alpha)
    if width > n:
        warnings.warn(f"band {width} exceeds n={n}; clamped", RuntimeWarning, stacklevel=2)
        width = n
    coeffs = np.array(fourier_coeffs(sym_abs, n, oversample).values.real)
    coeffs = 0.5 * (coeffs + coeffs[::-1])
    lags = np.arange(-n + 1, n)
    coeffs[np.abs(lags) >= width] = 0.0
    op = ToeplitzOperator(coeffs)
    op.bandwidth = width
    return op
