"""Dense eigenvalue checks of the preconditioned spectra (small sizes only).

Each check returns a :class:`SpectrumReport` listing the eigenvalues, the
interval they must fall in and how many miss it.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .circulant import sampled_circulant, strang
from .errors import InputError, SizeCapError
from .problems import ProblemInstance
from .symbols import Symbol, derive_views, epsilon_bound, fourier_coeffs, ratio_range
from .toeplitz import MultilevelToeplitzOperator, ToeplitzOperator, symmetric_part

__all__ = [
    "BoundCheck",
    "PairingCheck",
    "SpectrumReport",
    "preconditioned_spectrum_sym",
    "check_symeigs",
    "check_absfeigs",
    "check_eigfunction_lemma",
    "strang_abs_error_curve",
    "wiener_tail_slope",
    "write_spectrum",
    "read_spectrum",
    "EIG_CAP",
]

EIG_CAP = 2048
SOLVER_SLACK = 1e-8
GRID_SLACK = 1e-6
LEMMA_SLACK = 1e-9
CLUSTER_RADIUS = 0.05


@dataclass(frozen=True)
class BoundCheck:
    description: str
    lower: float
    upper: float
    violations: int
    max_violation: float


@dataclass(frozen=True)
class PairingCheck:
    checked: int
    unpaired: int
    max_mismatch: float


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray = field(repr=False)
    bound_check: Optional[BoundCheck] = None
    pairing_check: Optional[PairingCheck] = None
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = self.bound_check is None or self.bound_check.violations == 0
        return ok and (self.pairing_check is None or self.pairing_check.unpaired == 0)


def _bound(values, lower, upper, description) -> BoundCheck:
    below = np.maximum(lower - values, 0.0)
    above = np.maximum(values - upper, 0.0)
    miss = np.maximum(below, above)
    return BoundCheck(description, float(lower), float(upper),
                      int(np.count_nonzero(miss > 0)), float(miss.max(initial=0.0)))


def _check_cap(n: int):
    if n > EIG_CAP:
        raise SizeCapError(f"dense eigenproblem of size {n} exceeds cap {EIG_CAP}")


def preconditioned_spectrum_sym(P: np.ndarray, S: np.ndarray) -> SpectrumReport:
    """Eigenvalues of ``S x = lambda P x`` (same as ``P^{-1/2} S P^{-1/2}``), sorted."""
    P, S = np.asarray(P), np.asarray(S)
    if P.shape != S.shape or P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InputError("P and S must be square and of equal size")
    _check_cap(P.shape[0])
    if not np.allclose(S, S.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(S).max())):
        raise InputError("S is not symmetric")
    try:
        ev = sla.eigh(0.5 * (S + S.conj().T), P, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise InputError("P is not symmetric positive definite") from exc
    return SpectrumReport(np.sort(ev))


def _pairing(ev: np.ndarray, threshold: float, tol: float) -> PairingCheck:
    big = ev[np.abs(ev) > threshold]
    if big.size == 0:
        return PairingCheck(0, 0, 0.0)
    srt = np.sort(ev)
    pos = np.clip(np.searchsorted(srt, -big), 1, srt.size - 1)
    gap = np.minimum(np.abs(srt[pos] + big), np.abs(srt[pos - 1] + big))
    return PairingCheck(int(big.size), int(np.count_nonzero(gap > tol)), float(gap.max()))


def check_symeigs(problem, grid_size: Optional[int] = None,
                  epsilon: Optional[float] = None) -> SpectrumReport:
    """Certify ``1 <= |lambda| <= 1 + eps`` for ``A_R^{-1} Y A``, plus +/- pairing.

    Parameters
    ----------
    problem : ProblemInstance or (operator, symbol) pair
    grid_size : int, optional
        Points per axis for the grid estimate of ``eps`` (default 2**16 in
        one variable, 2**10 in two).
    epsilon : float, optional
        Use this bound instead of the grid estimate (fault injection).
    """
    op, sym = (problem.operator, problem.symbol) if isinstance(problem, ProblemInstance) \
        else problem
    _check_cap(op.size)
    if epsilon is None:
        views = derive_views(sym)
        grid = grid_size or (2 ** 16 if sym.dim == 1 else 2 ** 10)
        epsilon = epsilon_bound(views.imag, views.real, grid)
    A = op.dense(EIG_CAP)
    AR = symmetric_part(op).dense(EIG_CAP)
    report = preconditioned_spectrum_sym(AR, A[::-1])
    ev = report.eigenvalues
    report.bound_check = _bound(np.abs(ev), 1.0 - SOLVER_SLACK, 1.0 + epsilon + GRID_SLACK,
                                "|lambda| in [1, 1 + eps]")
    report.pairing_check = _pairing(ev, 1.0 + SOLVER_SLACK, SOLVER_SLACK)
    report.info["epsilon"] = float(epsilon)
    return report


def _real_toeplitz(sym: Symbol, dims, use_analytic=True) -> MultilevelToeplitzOperator:
    coeffs = fourier_coeffs(sym, dims, use_analytic=use_analytic)
    op = MultilevelToeplitzOperator(coeffs)
    if not op.is_real:
        raise InputError(f"{sym.name} does not generate a real Toeplitz matrix")
    return op


def check_absfeigs(sym: Symbol, n) -> SpectrumReport:
    """Certify that ``Y A_n(f / |f|)`` has its spectrum in ``[-1, 1]``.

    ``info["cluster_fraction"]`` is the share of eigenvalues within 0.05 of +/-1.
    """
    tilde = derive_views(sym).tilde
    op = _real_toeplitz(tilde, n, use_analytic=False)
    _check_cap(op.size)
    S = op.dense(EIG_CAP)[::-1]
    ev = np.sort(np.linalg.eigvalsh(0.5 * (S + S.T)))
    report = SpectrumReport(ev, _bound(ev, -1.0 - GRID_SLACK, 1.0 + GRID_SLACK,
                                       "lambda in [-1, 1]"))
    report.info["cluster_fraction"] = float(
        np.mean(np.abs(np.abs(ev) - 1.0) <= CLUSTER_RADIUS))
    return report


def check_eigfunction_lemma(f: Symbol, g: Symbol, n, grid_size: int = 2 ** 14) -> SpectrumReport:
    """Certify that ``A_n(g)^{-1} A_n(f)`` has its spectrum in ``(r, R)``.

    ``r`` and ``R`` are the grid infimum and supremum of ``f / g``.
    ``info["strict"]`` records whether every eigenvalue clears both ends by
    more than 1e-12 (only meaningful when ``r < R``).
    """
    r, R = ratio_range(f, g, grid_size)
    Af = MultilevelToeplitzOperator(fourier_coeffs(f, n))
    Ag = MultilevelToeplitzOperator(fourier_coeffs(g, n))
    _check_cap(Af.size)
    report = preconditioned_spectrum_sym(Ag.dense(EIG_CAP), Af.dense(EIG_CAP))
    ev = report.eigenvalues
    report.bound_check = _bound(ev, r - LEMMA_SLACK, R + LEMMA_SLACK, "lambda in (r, R)")
    report.info.update(r=r, R=R, strict=bool(
        r < R and np.all(ev > r + 1e-12) and np.all(ev < R - 1e-12)))
    return report


def wiener_tail_slope(sym: Symbol, count: int = 10_000) -> float:
    """Log-log slope of the coefficient envelope over lags 100..count.

    A slope below -1 indicates absolutely summable coefficients.
    """
    a = np.abs(fourier_coeffs(sym, count + 1).values)
    mid = count
    mag = np.maximum(a[mid + 1:], a[mid - 1::-1][: count])
    # running maximum from the right gives a monotone envelope
    env = np.maximum.accumulate(mag[::-1])[::-1]
    k = np.arange(1, count + 1)
    sel = (k >= 100) & (env > 1e-300)
    if np.count_nonzero(sel) < 2:
        return -np.inf
    return float(np.polyfit(np.log(k[sel]), np.log(env[sel]), 1)[0])


def strang_abs_error_curve(sym: Symbol, sizes: Sequence[int],
                           check_wiener: bool = True) -> np.ndarray:
    """``max_j | |lambda_j(S_n)| - |f(2 pi j / n)| |`` for each ``n``.

    ``S_n`` is the Strang circulant of ``A_n(f)``.
    """
    if sym.dim != 1:
        raise InputError("strang_abs_error_curve needs a univariate symbol")
    if check_wiener and wiener_tail_slope(sym) > -1.0:
        warnings.warn(f"coefficients of {sym.name} may not be absolutely summable",
                      RuntimeWarning, stacklevel=2)
    abs_sym = derive_views(sym).abs
    errors = []
    for n in sizes:
        T = ToeplitzOperator(fourier_coeffs(sym, int(n)))
        target = sampled_circulant(abs_sym, int(n)).eigs.real
        errors.append(np.max(np.abs(np.abs(strang(T).eigs) - target)))
    return np.array(errors)


def write_spectrum(path, eigenvalues) -> Path:
    """One eigenvalue per line as ``"re im"`` with 17 significant digits."""
    path = Path(path)
    ev = np.asarray(eigenvalues, dtype=complex).ravel()
    lines = [f"{z.real:.17g} {z.imag:.17g}" for z in ev]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path


def read_spectrum(path) -> np.ndarray:
    rows = [line.split() for line in Path(path).read_text(encoding="utf-8").splitlines()
            if line.strip()]
    return np.array([complex(float(re), float(im)) for re, im in rows])
