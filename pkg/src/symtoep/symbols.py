"""Generating functions (symbols) on [-pi, pi]^p and their Fourier coefficients.

A :class:`Symbol` wraps a vectorised callable ``func(theta_1, ..., theta_p)``.
Coefficients follow the convention

    a_j = (2 pi)^{-p} int f(theta) exp(-i <theta, j>) d theta,

so that the Toeplitz entry at lag ``i - j`` is ``a_{i-j}`` and
``f(theta) = sum_j a_j exp(i <theta, j>)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import AssumptionError, InputError, SingularSymbolError

__all__ = [
    "Symbol",
    "FourierCoefficients",
    "SymbolViews",
    "eval_symbol",
    "derive_views",
    "fourier_coeffs",
    "epsilon_bound",
    "sample_grid",
    "constant",
    "trig_polynomial",
]

DOMAIN_SLACK = 1e-12
ZERO_FR = 1e-13
ONE_SIDED_STEP = 1e-6
# kinks such as |1 - exp(it)|^alpha only give algebraic convergence
MIN_QUAD_POINTS = {1: 2 ** 16, 2: 2 ** 8}


def sample_grid(num: int) -> np.ndarray:
    """Uniform grid of ``num`` points on [-pi, pi)."""
    return -np.pi + 2.0 * np.pi * np.arange(num) / num


@dataclass(frozen=True)
class Symbol:
    """An evaluable generating function.

    Parameters
    ----------
    func : callable
        Vectorised map ``(theta_1, ..., theta_p) -> complex array``.
    dim : int
        Number of variables ``p`` (1 or 2).
    analytic_coeffs : callable, optional
        ``(j_1, ..., j_p) -> complex array`` giving exact Fourier
        coefficients for integer lag arrays. Used in preference to quadrature.
    phase : callable, optional
        Explicit ``f/|f|`` for symbols whose zeros are removable for the
        phase (e.g. ``(2 - 2cos t)(1 + i t)`` at ``t = 0``).
    name : str
        Label used in reports.
    """

    func: Callable[..., np.ndarray]
    dim: int = 1
    analytic_coeffs: Optional[Callable[..., np.ndarray]] = None
    phase: Optional[Callable[..., np.ndarray]] = None
    name: str = "f"

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InputError(f"symbol dimension must be 1 or 2, got {self.dim}")

    def __call__(self, *theta):
        if len(theta) != self.dim:
            raise InputError(f"expected {self.dim} angle arrays, got {len(theta)}")
        theta = [np.asarray(t, dtype=float) for t in theta]
        return np.asarray(self.func(*theta), dtype=complex)

    # A little linear algebra on symbols; coefficient tables follow along.

    def __add__(self, other):
        if np.isscalar(other):
            other = constant(other, self.dim)
        _check_same_dim(self, other)
        coeffs = None
        if self.analytic_coeffs is not None and other.analytic_coeffs is not None:
            ca, cb = self.analytic_coeffs, other.analytic_coeffs
            coeffs = lambda *j: ca(*j) + cb(*j)  # noqa: E731
        fa, fb = self.func, other.func
        return Symbol(lambda *t: fa(*t) + fb(*t), self.dim, coeffs,
                      name=f"({self.name} + {other.name})")

    __radd__ = __add__

    def __mul__(self, scale):
        if not np.isscalar(scale):
            return NotImplemented
        coeffs = None
        if self.analytic_coeffs is not None:
            ca = self.analytic_coeffs
            coeffs = lambda *j: scale * ca(*j)  # noqa: E731
        fa = self.func
        return Symbol(lambda *t: scale * fa(*t), self.dim, coeffs,
                      name=f"{scale}*{self.name}")

    __rmul__ = __mul__

    def reflect(self) -> "Symbol":
        """The symbol ``theta -> f(-theta)``; coefficients ``a_{-j}``."""
        coeffs = None
        if self.analytic_coeffs is not None:
            ca = self.analytic_coeffs
            coeffs = lambda *j: ca(*[-np.asarray(x) for x in j])  # noqa: E731
        fa = self.func
        return Symbol(lambda *t: fa(*[-x for x in t]), self.dim, coeffs,
                      name=f"{self.name}(-.)")


def _check_same_dim(a: Symbol, b: Symbol):
    if a.dim != b.dim:
        raise InputError(f"dimension mismatch: {a.dim} vs {b.dim}")


def constant(c: complex, dim: int = 1) -> Symbol:
    def func(*t):
        return np.full(np.broadcast(*t).shape, c, dtype=complex)

    def coeffs(*j):
        zero = np.all([np.asarray(x) == 0 for x in j], axis=0)
        return np.where(zero, complex(c), 0j)

    return Symbol(func, dim, coeffs, name=str(c))


def trig_polynomial(table: dict, dim: int = 1, name: str = "p") -> Symbol:
    """Trigonometric polynomial ``sum_j table[j] exp(i <theta, j>)``.

    Keys are ints (``dim == 1``) or tuples of ints.
    """
    items = [((k,) if np.isscalar(k) else tuple(k), complex(v)) for k, v in table.items()]
    for k, _ in items:
        if len(k) != dim:
            raise InputError(f"multi-index {k} does not match dim {dim}")

    def func(*t):
        out = np.zeros(np.broadcast(*t).shape, dtype=complex)
        for k, v in items:
            out += v * np.exp(1j * sum(ki * ti for ki, ti in zip(k, t)))
        return out

    def coeffs(*j):
        j = np.broadcast_arrays(*[np.asarray(x) for x in j])
        out = np.zeros(j[0].shape, dtype=complex)
        for k, v in items:
            out[np.all([x == ki for x, ki in zip(j, k)], axis=0)] += v
        return out

    return Symbol(func, dim, coeffs, name=name)


@dataclass(frozen=True)
class FourierCoefficients:
    """Coefficient tensor with ``values[j + n - 1]`` holding ``a_j`` per axis."""

    dims: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        values = np.asarray(self.values)
        expected = tuple(2 * n - 1 for n in dims)
        if values.shape != expected:
            raise InputError(f"coefficient extents {values.shape} != {expected}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, lag):
        lag = (lag,) if np.isscalar(lag) else tuple(lag)
        return self.values[tuple(j + n - 1 for j, n in zip(lag, self.dims))]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values) or not np.any(self.values.imag)


def eval_symbol(sym: Symbol, theta) -> complex:
    """Evaluate ``sym`` at a single point ``theta`` of [-pi, pi]^p."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (sym.dim,):
        raise InputError(f"point must have {sym.dim} components")
    if np.any(np.abs(theta) > np.pi + DOMAIN_SLACK) or not np.all(np.isfinite(theta)):
        raise InputError(f"theta={theta} outside [-pi, pi]^{sym.dim}")
    return complex(sym(*theta))


class SymbolViews(NamedTuple):
    real: Symbol
    imag: Symbol
    abs: Symbol
    tilde: Symbol


def derive_views(sym: Symbol, delta: float = 1e-12) -> SymbolViews:
    """Return ``(f_R, f_I, |f|, f/|f|)``.

    The phase view raises :class:`SingularSymbolError` when evaluated at a
    point where ``|f| < delta``, unless ``sym.phase`` supplies it explicitly.
    """
    f = sym.func
    real_coeffs = imag_coeffs = None
    if sym.analytic_coeffs is not None:
        c = sym.analytic_coeffs

        def real_coeffs(*j):
            return 0.5 * (c(*j) + np.conj(c(*[-np.asarray(x) for x in j])))

        def imag_coeffs(*j):
            return -0.5j * (c(*j) - np.conj(c(*[-np.asarray(x) for x in j])))

    def tilde(*t):
        if sym.phase is not None:
            return sym.phase(*t)
        v = f(*t)
        mag = np.abs(v)
        if np.any(mag < delta):
            raise SingularSymbolError(
                f"|{sym.name}| < {delta:g} at {np.count_nonzero(mag < delta)} point(s)")
        return v / mag

    return SymbolViews(
        Symbol(lambda *t: np.real(f(*t)) + 0j, sym.dim, real_coeffs, name=f"Re {sym.name}"),
        Symbol(lambda *t: np.imag(f(*t)) + 0j, sym.dim, imag_coeffs, name=f"Im {sym.name}"),
        Symbol(lambda *t: np.abs(f(*t)) + 0j, sym.dim, name=f"|{sym.name}|"),
        Symbol(tilde, sym.dim, phase=sym.phase, name=f"{sym.name}/|{sym.name}|"),
    )


def _as_dims(dims, p: int) -> tuple:
    dims = (int(dims),) if np.isscalar(dims) else tuple(int(n) for n in dims)
    if len(dims) != p or any(n < 1 for n in dims):
        raise InputError(f"dims {dims} invalid for a {p}-variate symbol")
    return dims


def fourier_coeffs(sym: Symbol, dims, oversample: int = 8,
                   use_analytic: bool = True) -> FourierCoefficients:
    """Fourier coefficients ``a_j`` for ``|j_i| <= n_i - 1``.

    Exact coefficients are used when the symbol carries them; otherwise the
    midpoint rule on ``oversample * max(2 n_i - 1)`` points per axis (at
    least ``MIN_QUAD_POINTS[p]``), evaluated with one FFT.
    """
    dims = _as_dims(dims, sym.dim)
    if oversample < 4:
        raise InputError("oversample must be >= 4")
    lags = [np.arange(-n + 1, n) for n in dims]
    if use_analytic and sym.analytic_coeffs is not None:
        grids = np.meshgrid(*lags, indexing="ij")
        values = np.asarray(sym.analytic_coeffs(*grids), dtype=complex)
        return FourierCoefficients(dims, values)

    m = max(oversample * max(2 * n - 1 for n in dims), MIN_QUAD_POINTS[sym.dim])
    # midpoint grid: symmetric about 0 and never samples a jump at +/-pi
    step = 2.0 * np.pi / m
    theta = -np.pi + step * (np.arange(m) + 0.5)
    samples = sym(*np.meshgrid(*([theta] * sym.dim), indexing="ij"))
    spectrum = np.fft.fftn(samples) / m ** sym.dim
    values = spectrum[np.ix_(*[lag % m for lag in lags])]
    for axis, lag in enumerate(lags):
        shape = [1] * sym.dim
        shape[axis] = lag.size
        # undo the grid origin theta_0 = -pi + step / 2
        values = values * np.exp(1j * lag * (np.pi - 0.5 * step)).reshape(shape)
    return FourierCoefficients(dims, values)


def epsilon_bound(f_imag: Symbol, f_real: Symbol, grid_size: int = 2 ** 16) -> float:
    """Grid approximation (from below) of ``ess sup |f_I / f_R|``.

    Points where ``f_R`` vanishes are replaced by one-sided samples at
    distance 1e-6 along each axis, so removable 0/0 limits are included.

    Raises
    ------
    AssumptionError
        If ``f_R`` is negative anywhere on the grid.
    """
    _check_same_dim(f_imag, f_real)
    p = f_real.dim
    theta = sample_grid(int(grid_size))
    grids = np.meshgrid(*([theta] * p), indexing="ij")
    fr = np.real(f_real(*grids))
    fi = np.real(f_imag(*grids))
    if np.any(fr < -ZERO_FR):
        raise AssumptionError(
            f"f_R is negative on the grid (min {fr.min():.3e}); not essentially positive")
    keep = fr > ZERO_FR
    best = float(np.max(np.abs(fi[keep] / fr[keep]))) if np.any(keep) else 0.0

    if not np.all(keep):
        points = [g[~keep] for g in grids]
        for axis in range(p):
            for step in (-ONE_SIDED_STEP, ONE_SIDED_STEP):
                shifted = [x.copy() for x in points]
                shifted[axis] = shifted[axis] + step
                # wrap back into [-pi, pi]
                shifted[axis] = (shifted[axis] + np.pi) % (2 * np.pi) - np.pi
                sr = np.real(f_real(*shifted))
                si = np.real(f_imag(*shifted))
                ok = sr > ZERO_FR
                if np.any(ok):
                    best = max(best, float(np.max(np.abs(si[ok] / sr[ok]))))
    return best


def ratio_range(f: Symbol, g: Symbol, grid_size: int = 2 ** 14) -> tuple:
    """Grid ``(inf, sup)`` of ``f / g`` for real symbols with ``g`` essentially positive."""
    _check_same_dim(f, g)
    theta = sample_grid(int(grid_size))
    grids = np.meshgrid(*([theta] * f.dim), indexing="ij")
    fv = np.real(f(*grids))
    gv = np.real(g(*grids))
    if np.any(gv < -ZERO_FR):
        raise AssumptionError("denominator symbol is negative on the grid")
    keep = gv > ZERO_FR
    if not np.any(keep):
        raise AssumptionError("denominator symbol vanishes on the whole grid")
    q = fv[keep] / gv[keep]
    return float(q.min()), float(q.max())

