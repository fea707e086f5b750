"""Matrix-free (multilevel) Toeplitz operators.

Entry ``(i, j)`` of a Toeplitz operator is ``a_{i-j}``; for two levels the
entry at multi-indices ``((i1, i2), (j1, j2))`` is ``a_{(i1-j1, i2-j2)}``.
Vectors are stored row-major over ``dims``, so the last level varies fastest
(for Example-3 style problems ``dims = (n_y, n_x)`` and x is the fast axis).

Products use a circulant embedding of length ``2 n_i`` per level and FFTs.
"""
from __future__ import annotations

from math import prod

import numpy as np
from scipy import fft as sfft

from .errors import InputError, SizeCapError
from .symbols import FourierCoefficients

__all__ = [
    "MultilevelToeplitzOperator",
    "ToeplitzOperator",
    "from_coeffs",
    "flip",
    "symmetrized_apply",
    "symmetric_part",
    "materialize_dense",
    "DENSE_CAP",
]

DENSE_CAP = 4096
_REAL_TOL = 1e-14


class MultilevelToeplitzOperator:
    """Toeplitz operator on ``prod(dims)`` unknowns defined by its coefficients.

    Parameters
    ----------
    coeffs : array_like or FourierCoefficients
        Tensor of extents ``2 n_i - 1``; ``coeffs[j + n - 1]`` is ``a_j``.
    dims : tuple of int, optional
        Level sizes; inferred from the extents when omitted.
    """

    def __init__(self, coeffs, dims=None):
        if isinstance(coeffs, FourierCoefficients):
            dims = coeffs.dims if dims is None else dims
            coeffs = coeffs.values
        values = np.array(coeffs)
        if values.ndim == 0:
            raise InputError("coefficients must be at least one-dimensional")
        if dims is None:
            if any(m % 2 == 0 for m in values.shape):
                raise InputError(f"extents {values.shape} are not of the form 2n-1")
            dims = tuple((m + 1) // 2 for m in values.shape)
        dims = tuple(int(n) for n in np.atleast_1d(dims))
        if len(dims) not in (1, 2):
            raise InputError("only one- and two-level operators are supported")
        if values.shape != tuple(2 * n - 1 for n in dims):
            raise InputError(f"extents {values.shape} do not match dims {dims}")
        if np.iscomplexobj(values):
            scale = max(1.0, float(np.max(np.abs(values))))
            if np.max(np.abs(values.imag)) <= _REAL_TOL * scale:
                values = values.real.copy()
        values.setflags(write=False)

        self.coeffs = values
        self.dims = dims
        self.p = len(dims)
        self.size = prod(dims)
        self.shape = (self.size, self.size)
        self.dtype = values.dtype
        self.is_real = not np.iscomplexobj(values)
        self._ext = tuple(2 * n for n in dims)
        emb = np.zeros(self._ext, dtype=values.dtype)
        emb[np.ix_(*[np.arange(-n + 1, n) % (2 * n) for n in dims])] = values
        axes = tuple(range(self.p))
        self._hat = sfft.rfftn(emb, axes=axes) if self.is_real else sfft.fftn(emb, axes=axes)
        self._transpose = None

    def __repr__(self):
        return f"{type(self).__name__}(dims={self.dims}, dtype={self.dtype})"

    def lag(self, *j):
        return self.coeffs[tuple(ji + n - 1 for ji, n in zip(j, self.dims))]

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.coeffs, self.coeffs[(slice(None, None, -1),) * self.p]))

    def matmat(self, X):
        """Apply to the columns of ``X`` (shape ``(size, k)``)."""
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[0] != self.size:
            raise InputError(f"expected shape ({self.size}, k), got {X.shape}")
        if self.is_real and np.iscomplexobj(X):
            return self.matmat(X.real) + 1j * self.matmat(X.imag)
        k = X.shape[1]
        axes = tuple(range(self.p))
        block = X.reshape(self.dims + (k,))
        hat = self._hat.reshape(self._hat.shape + (1,))
        if self.is_real:
            prod_hat = sfft.rfftn(block, s=self._ext, axes=axes) * hat
            full = sfft.irfftn(prod_hat, s=self._ext, axes=axes)
        else:
            full = sfft.ifftn(sfft.fftn(block, s=self._ext, axes=axes) * hat, axes=axes)
        out = full[tuple(slice(0, n) for n in self.dims)]
        return out.reshape(self.size, k)

    def matvec(self, x):
        x = np.asarray(x)
        if x.shape != (self.size,):
            raise InputError(f"vector length {x.shape} does not match operator size {self.size}")
        return self.matmat(x[:, None])[:, 0]

    __matmul__ = matvec

    def transpose(self) -> "MultilevelToeplitzOperator":
        if self._transpose is None:
            rev = self.coeffs[(slice(None, None, -1),) * self.p]
            self._transpose = type(self)(rev, self.dims)
            self._transpose._transpose = self
        return self._transpose

    @property
    def T(self):
        return self.transpose()

    def rmatvec(self, x):
        return self.transpose().matvec(x)

    def diagonal(self) -> np.ndarray:
        return np.full(self.size, self.lag(*([0] * self.p)))

    def symmetric_part(self):
        return symmetric_part(self)

    def dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        return materialize_dense(self, cap)


class ToeplitzOperator(MultilevelToeplitzOperator):
    """One-level Toeplitz operator; ``coeffs`` holds ``a_{-n+1}, ..., a_{n-1}``."""

    def __init__(self, coeffs, dims=None):
        super().__init__(coeffs, dims)
        if self.p != 1:
            raise InputError("ToeplitzOperator needs one-level coefficients")

    @property
    def n(self) -> int:
        return self.dims[0]

    @classmethod
    def from_column_row(cls, column, row):
        """Build from first column ``(a_0, a_1, ...)`` and first row ``(a_0, a_{-1}, ...)``."""
        column, row = np.asarray(column), np.asarray(row)
        if column.shape != row.shape or column[0] != row[0]:
            raise InputError("first column and row must have equal length and corner")
        return cls(np.concatenate([row[:0:-1], column]))


def from_coeffs(coeffs: FourierCoefficients):
    """Operator whose dense form has entry ``a_{i-j}`` (per level)."""
    if not isinstance(coeffs, FourierCoefficients):
        coeffs = FourierCoefficients(tuple((m + 1) // 2 for m in np.shape(coeffs)), coeffs)
    if len(coeffs.dims) == 1:
        return ToeplitzOperator(coeffs)
    return MultilevelToeplitzOperator(coeffs)


def flip(dims, x) -> np.ndarray:
    """Apply the exchange matrix ``Y_{n_1} (x) ... (x) Y_{n_p}``."""
    dims = tuple(np.atleast_1d(dims))
    x = np.asarray(x)
    if x.shape != (prod(dims),):
        raise InputError(f"vector length {x.shape} does not match dims {dims}")
    # reversing every level of a row-major tensor reverses the flat vector
    return x[::-1].copy()


def symmetrized_apply(T: MultilevelToeplitzOperator, x) -> np.ndarray:
    """``Y T x``; the induced operator is symmetric (a multilevel Hankel matrix)."""
    return flip(T.dims, T.matvec(x))


def symmetric_part(T: MultilevelToeplitzOperator):
    """``(T + T^T) / 2``, the operator generated by ``Re f``."""
    if not T.is_real:
        raise InputError("symmetric_part expects real coefficients")
    rev = T.coeffs[(slice(None, None, -1),) * T.p]
    return type(T)(0.5 * (T.coeffs + rev), T.dims)


def materialize_dense(T: MultilevelToeplitzOperator, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense matrix of ``T``; refuses above ``cap`` rows."""
    if T.size > cap:
        raise SizeCapError(f"dense size {T.size} exceeds cap {cap}")
    idx = []
    for n in T.dims:
        i = np.arange(n)
        idx.append(i[:, None] - i[None, :] + n - 1)
    if T.p == 1:
        return T.coeffs[idx[0]].copy()
    # entry ((i1, i2), (j1, j2)) = a_{(i1-j1, i2-j2)}
    l1 = idx[0][:, None, :, None]
    l2 = idx[1][None, :, None, :]
    return T.coeffs[l1, l2].reshape(T.size, T.size)
