"""Circulant preconditioners stored by their eigenvalues.

Eigenvalues follow ``lambda_k = sum_j c_j exp(2 pi i j k / n)`` where ``c`` is
the first column, so ``lambda = n * ifft(c)`` and the circulant built from
samples ``f(2 pi k / n)`` approximates ``A_n(f)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .errors import InputError, SingularPreconditionerError
from .symbols import Symbol
from .toeplitz import MultilevelToeplitzOperator, ToeplitzOperator

__all__ = [
    "CirculantOperator",
    "BlockCirculant2D",
    "strang",
    "optimal",
    "superoptimal",
    "sampled_circulant",
    "absolute_value",
    "apply",
    "solve",
    "block2d",
]

SINGULAR_TOL = 1e-12
IMAG_TOL = 1e-12


def _real_if_tiny(y, ref):
    if np.iscomplexobj(y) and not np.iscomplexobj(ref):
        scale = max(1.0, float(np.max(np.abs(y))) if y.size else 1.0)
        if np.max(np.abs(y.imag), initial=0.0) < IMAG_TOL * scale:
            return y.real
    return y


def _conj_symmetric(eigs) -> bool:
    # eigenvalues of a real circulant satisfy lambda_{n-k} = conj(lambda_k)
    mirrored = np.conj(np.roll(eigs[::-1], 1))
    return np.allclose(eigs, mirrored, rtol=0, atol=IMAG_TOL * max(1.0, np.max(np.abs(eigs))))


class CirculantOperator:
    """Circulant ``F^* diag(eigs) F`` with eigenvalues in Fourier order."""

    def __init__(self, eigs):
        eigs = np.array(eigs, dtype=complex)
        if eigs.ndim != 1 or eigs.size == 0:
            raise InputError("eigs must be a non-empty vector")
        eigs.setflags(write=False)
        self.eigs = eigs
        self.n = eigs.size
        self.shape = (self.n, self.n)
        self.is_real = _conj_symmetric(eigs)

    def __repr__(self):
        return f"CirculantOperator(n={self.n})"

    @classmethod
    def from_first_column(cls, column):
        column = np.asarray(column)
        return cls(column.size * sfft.ifft(column))

    @property
    def first_column(self) -> np.ndarray:
        col = sfft.fft(self.eigs) / self.n
        return col.real if self.is_real else col

    @property
    def is_spd(self) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.eigs))))
        return bool(np.all(np.abs(self.eigs.imag) < IMAG_TOL * scale)
                     and np.all(self.eigs.real > SINGULAR_TOL * scale) and self.is_real)

    def apply(self, x):
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise InputError(f"vector length {x.shape} != {self.n}")
        y = sfft.fft(self.eigs * sfft.ifft(x))
        return _real_if_tiny(y, x) if self.is_real else y

    matvec = apply

    def solve(self, x):
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise InputError(f"vector length {x.shape} != {self.n}")
        mag = np.abs(self.eigs)
        if mag.min() <= SINGULAR_TOL * mag.max():
            raise SingularPreconditionerError(
                f"circulant has eigenvalue {mag.min():.3e} (max {mag.max():.3e})")
        y = sfft.fft(sfft.ifft(x) / self.eigs)
        return _real_if_tiny(y, x) if self.is_real else y

    def solve_transpose(self, x):
        # C^T has eigenvalues lambda_{-k}
        return CirculantOperator(np.roll(self.eigs[::-1], 1)).solve(x)

    def absolute_value(self) -> "CirculantOperator":
        return CirculantOperator(np.abs(self.eigs))

    def dense(self) -> np.ndarray:
        col = self.first_column
        idx = (np.arange(self.n)[:, None] - np.arange(self.n)[None, :]) % self.n
        return col[idx]


def _toeplitz_lags(T: ToeplitzOperator):
    if not isinstance(T, MultilevelToeplitzOperator) or T.p != 1:
        raise InputError("a one-level Toeplitz operator is required")
    if T.n < 2:
        raise InputError("n must be at least 2")
    return T.coeffs, T.n


def strang(T: ToeplitzOperator) -> CirculantOperator:
    """Strang circulant: keep the central ``floor(n/2)`` diagonals, wrap the rest.

    For even ``n`` the middle entry ``c_{n/2}`` takes the positive lag ``a_{n/2}``.
    """
    a, n = _toeplitz_lags(T)
    j = np.arange(n)
    lag = np.where(j <= n // 2, j, j - n)
    return CirculantOperator.from_first_column(a[lag + n - 1])


def optimal(T: ToeplitzOperator) -> CirculantOperator:
    """T. Chan's optimal circulant, the Frobenius-nearest circulant to ``T``."""
    a, n = _toeplitz_lags(T)
    j = np.arange(n)
    col = (n - j) * a[j + n - 1]
    col[1:] += j[1:] * a[j[1:] - 1]  # lag j - n sits at index j - 1
    return CirculantOperator.from_first_column(col / n)


def _optimal_gram_eigs(T: ToeplitzOperator, block: int = 256) -> np.ndarray:
    # lambda_k(optimal(T T^H)) = || T^H v_k ||^2 with v_k the k-th Fourier vector
    n = T.n
    Th = T.transpose() if T.is_real else MultilevelToeplitzOperator(np.conj(T.coeffs[::-1]))
    out = np.empty(n)
    j = np.arange(n)[:, None]
    for start in range(0, n, block):
        k = np.arange(start, min(start + block, n))[None, :]
        V = np.exp(-2j * np.pi * j * k / n) / np.sqrt(n)
        W = Th.matmat(V)
        out[start:start + k.size] = np.sum(np.abs(W) ** 2, axis=0)
    return out


def superoptimal(T: ToeplitzOperator) -> CirculantOperator:
    """Tyrtyshnikov's superoptimal circulant, minimising ``||I - C^{-1} T||_F``."""
    opt = optimal(T)
    mag = np.abs(opt.eigs)
    if mag.min() <= SINGULAR_TOL * mag.max():
        raise SingularPreconditionerError("optimal circulant of T is singular")
    return CirculantOperator(_optimal_gram_eigs(T) / np.conj(opt.eigs))


def sampled_circulant(sym: Symbol, n: int) -> CirculantOperator:
    """``C_n(f)``: eigenvalues ``f(2 pi j / n)``."""
    if sym.dim != 1:
        raise InputError("sampled_circulant needs a univariate symbol")
    theta = 2.0 * np.pi * np.arange(n) / n
    theta = (theta + np.pi) % (2.0 * np.pi) - np.pi  # f is 2 pi periodic
    eigs = sym(theta)
    if not np.all(np.isfinite(eigs)):
        raise InputError("symbol produced non-finite samples")
    return CirculantOperator(eigs)


def absolute_value(C: CirculantOperator) -> CirculantOperator:
    return C.absolute_value()


def apply(C, x):
    return C.apply(x)


def solve(C, x):
    return C.solve(x)


@dataclass(frozen=True)
class BlockCirculant2D:
    """Two-level circulant ``combine(lambda_x, lambda_y)`` on an x-fastest grid.

    ``kind`` is ``"strang-nonsym"`` (``1 - lx - ly``) or ``"strang-abs"``
    (``1 + |lx| + |ly|``).
    """

    dims: tuple  # (n_x, n_y)
    eigs_x: np.ndarray
    eigs_y: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in ("strang-nonsym", "strang-abs"):
            raise InputError(f"unknown block circulant kind {self.kind!r}")
        lx, ly = self.eigs_x[None, :], self.eigs_y[:, None]
        if self.kind == "strang-nonsym":
            eff = 1.0 - lx - ly
        else:
            eff = 1.0 + np.abs(lx) + np.abs(ly) + 0j
        object.__setattr__(self, "eigs", eff)

    @property
    def size(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def shape(self):
        return (self.size, self.size)

    @property
    def is_spd(self) -> bool:
        return self.kind == "strang-abs"

    def _transform(self, x, factor):
        nx, ny = self.dims
        x = np.asarray(x)
        if x.shape != (self.size,):
            raise InputError(f"vector length {x.shape} != {self.size}")
        X = x.reshape(ny, nx)
        y = sfft.fft2(factor * sfft.ifft2(X)).ravel()
        return _real_if_tiny(y, x)

    def apply(self, x):
        return self._transform(x, self.eigs)

    matvec = apply

    def solve(self, x):
        mag = np.abs(self.eigs)
        if mag.min() <= SINGULAR_TOL * mag.max():
            raise SingularPreconditionerError("block circulant is singular")
        return self._transform(x, 1.0 / self.eigs)

    def solve_transpose(self, x):
        flipped = np.roll(np.roll(self.eigs[::-1, ::-1], 1, axis=0), 1, axis=1)
        mag = np.abs(flipped)
        if mag.min() <= SINGULAR_TOL * mag.max():
            raise SingularPreconditionerError("block circulant is singular")
        return self._transform(x, 1.0 / flipped)


def block2d(kind: str, lx_coeffs, ly_coeffs, dims) -> BlockCirculant2D:
    """Block circulant from Strang approximations of the 1D factors ``L_x``, ``L_y``.

    ``dims`` is ``(n_x, n_y)``; coefficients are ``(a_{-n+1}, ..., a_{n-1})``.
    """
    nx, ny = (int(d) for d in dims)
    cx = strang(ToeplitzOperator(np.asarray(lx_coeffs), (nx,)))
    cy = strang(ToeplitzOperator(np.asarray(ly_coeffs), (ny,)))
    bc = BlockCirculant2D((nx, ny), cx.eigs, cy.eigs, kind)
    mag = np.abs(bc.eigs)
    if kind == "strang-nonsym" and mag.min() <= SINGULAR_TOL * mag.max():
        raise SingularPreconditionerError("nonsymmetric block circulant is singular")
    return bc
