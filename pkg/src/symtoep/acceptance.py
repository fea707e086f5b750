"""Acceptance checks, grouped into a ``theorems`` and a ``tables`` suite.

Each check returns a :class:`CriterionResult`; :func:`run_suite` runs a
group and :func:`format_result` renders the one-line PASS/FAIL summary.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bench import solve
from .errors import SymtoepError
from .krylov import gmres_right, lsqr, minres
from .preconditioners import make_preconditioner
from .problems import example1, example1_symbol, example2, example2_symbol, example3
from .spectral import (check_absfeigs, check_eigfunction_lemma, check_symeigs,
                       strang_abs_error_curve)
from .symbols import derive_views, epsilon_bound, trig_polynomial
from .toeplitz import MultilevelToeplitzOperator, flip, symmetrized_apply

__all__ = [
    "CriterionResult",
    "CRITERIA",
    "SUITES",
    "run_suite",
    "format_result",
    "TABLE4",
    "table4_epsilons",
    "TABLE4_WEIGHTS",
    "TABLE4_N",
]

TABLE4_WEIGHTS = ((0.0, 3.0), (1.0, 3.0), (0.5, 1.0), (1.0, 1.0))
TABLE4 = {
    1.0: (1.13, 0.67, 0.25, 0.00),
    1.25: (0.70, 0.39, 0.17, 0.00),
    1.5: (0.42, 0.23, 0.11, 0.00),
    1.75: (0.20, 0.11, 0.05, 0.00),
}
TABLE4_N = 4095


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)


def format_result(res: CriterionResult) -> str:
    status = "PASS" if res.passed else "FAIL"
    return f"[{status}] criterion {res.number:2d}: {res.title} ({res.seconds:.1f}s) {res.detail}"


def _timed(number: int, title: str, limit: Optional[float] = None):
    def wrap(fn: Callable[..., tuple]):
        def runner(**opts) -> CriterionResult:
            start = time.perf_counter()
            try:
                passed, detail, data = fn(**opts)
            except SymtoepError as exc:
                passed, detail, data = False, f"error: {exc}", {}
            elapsed = time.perf_counter() - start
            if limit is not None and elapsed > limit:
                passed = False
                detail += f"; over the {limit:g}s budget"
            return CriterionResult(number, title, passed, detail, elapsed, data)
        runner.number = number
        return runner
    return wrap


def _within(value: int, target: int, rel: float = 0.10, absolute: int = 5) -> bool:
    return abs(value - target) <= max(rel * target, absolute)


def table4_epsilons(n: int = TABLE4_N, grid_size: int = 2 ** 16) -> dict:
    out = {}
    for alpha in TABLE4:
        for dp, dm in TABLE4_WEIGHTS:
            views = derive_views(example2_symbol(n, alpha, dp, dm))
            out[(alpha, dp, dm)] = epsilon_bound(views.imag, views.real, grid_size)
    return out


@_timed(1, "epsilon bound table", limit=5.0)
def c01_table4(**_):
    eps = table4_epsilons()
    worst = 0.0
    for alpha, row in TABLE4.items():
        for (dp, dm), ref in zip(TABLE4_WEIGHTS, row):
            worst = max(worst, abs(eps[(alpha, dp, dm)] - ref))
    return worst <= 0.005, f"max deviation {worst:.4f} over 16 entries", {"eps": eps}


@_timed(2, "one-level A_R inclusion and pairing", limit=120.0)
def c02_symeigs(epsilon_scale: float = 1.0, **_):
    cases = [("ex1", example1(512))]
    for alpha in (1.25, 1.5, 1.75):
        for dp, dm in TABLE4_WEIGHTS:
            cases.append((f"ex2 a={alpha} d=({dp},{dm})", example2(512, alpha, dp, dm)))
    failed = []
    for name, prob in cases:
        eps = None
        if epsilon_scale != 1.0:
            v = derive_views(prob.symbol)
            eps = epsilon_scale * epsilon_bound(v.imag, v.real)
        if not check_symeigs(prob, epsilon=eps).passed:
            failed.append(name)
    return not failed, f"{len(cases) - len(failed)}/{len(cases)} cases certified" + (
        f"; failing {failed}" if failed else ""), {}


@_timed(3, "two-level A_R inclusion and pairing")
def c03_multilevel(epsilon_scale: float = 1.0, **_):
    weights = ((2.0, 0.5, 0.3, 1.0), (0.5, 2.0, 1.0, 0.3))
    failed, total = [], 0
    for ab in ((1.5, 1.25), (1.5, 1.75)):
        for w in weights:
            total += 1
            prob = example3(15, *ab, *w)
            eps = None
            if epsilon_scale != 1.0:
                v = derive_views(prob.symbol)
                eps = epsilon_scale * epsilon_bound(v.imag, v.real, 2 ** 10)
            if not check_symeigs(prob, epsilon=eps).passed:
                failed.append((ab, w))
    return not failed, f"{total - len(failed)}/{total} cases certified", {}


@_timed(4, "phase-symbol inclusion in [-1, 1]")
def c04_absfeigs(**_):
    syms = [example1_symbol()] + [example2_symbol(512, a, 1.0, 3.0) for a in (1.25, 1.5, 1.75)]
    reports = [check_absfeigs(s, 512) for s in syms]
    worst = max(r.bound_check.max_violation for r in reports)
    frac = reports[0].info["cluster_fraction"]
    ok = all(r.passed for r in reports)
    return ok, f"max violation {worst:.2e}; ex1 clustering {frac:.3f}", {}


@_timed(5, "Strang absolute value convergence")
def c05_strang_curve(**_):
    sizes = [127, 511, 2047, 8191]
    err = strang_abs_error_curve(example2_symbol(4095, 1.5, 0.5, 1.0), sizes)
    ok = bool(np.all(np.diff(err) < 0) and err[-1] < 1e-2)
    return ok, "errors " + ", ".join(f"{e:.2e}" for e in err), {"errors": err}


def _iterations(prob, solver, precond, maxit=200):
    P, _ = make_preconditioner(precond, prob, solver)
    rep = solve(prob, solver, P, maxit=maxit)
    return rep.iterations if rep.converged else None


@_timed(6, "Example 1 iterations with A_R", limit=60.0)
def c06_table1(maxit: int = 200, **_):
    sizes = (1023, 2047, 4095, 8191)
    ref = {"minres": (68, 70, 71, 72), "gmres": (67, 68, 69, 72)}
    got = {s: [] for s in ref}
    ok = True
    for i, n in enumerate(sizes):
        prob = example1(n)
        for s in ref:
            its = _iterations(prob, s, "ar", maxit)
            got[s].append(its)
            ok &= its is not None and _within(its, ref[s][i])
    return ok, f"MINRES {got['minres']} GMRES {got['gmres']}", got


@_timed(7, "Example 1 MINRES with exact A_M")
def c07_table2(maxit: int = 200, **_):
    got = [_iterations(example1(n), "minres", "am-exact", maxit) for n in (1023, 2047, 4095)]
    ok = all(g is not None and 8 <= g <= 15 for g in got)
    return ok, f"iterations {got}", {"iterations": got}


@_timed(8, "Example 2 MINRES with MG(A_R) mesh independence")
def c08_table3(maxit: int = 200, **_):
    got, ok = {}, True
    for alpha in (1.25, 1.5, 1.75):
        its = [_iterations(example2(n, alpha, 0.5, 1.0), "minres", "mg-ar", maxit)
               for n in (1023, 4095, 16383)]
        got[alpha] = its
        ok &= all(i is not None and i <= 15 for i in its) and (
            None not in its and max(its) - min(its) <= 3)
    return ok, " ".join(f"a={a}: {v}" for a, v in got.items()), got


@_timed(9, "Example 3 block circulant versus MG(A_R)")
def c09_table5(maxit: int = 200, **_):
    circ, mg = [], []
    for n in (31, 127):
        prob = example3(n, 1.5, 1.75, 2.0, 0.5, 0.3, 1.0)
        circ.append(_iterations(prob, "minres", "block-circ-abs", maxit))
        mg.append(_iterations(prob, "minres", "mg-ar", maxit))
    ok = None not in circ + mg and circ[1] > circ[0] and max(mg) - min(mg) <= 2 \
        and all(abs(m - 10) <= 2 for m in mg)
    return ok, f"|C_n| {circ} MG(A_R) {mg}", {"circ": circ, "mg": mg}


def _random_real_trig(rng, degree: int, name: str):
    table = {0: rng.normal()}
    for k in range(1, degree + 1):
        c = complex(rng.normal(), rng.normal()) / k
        table[k], table[-k] = c, np.conj(c)
    return trig_polynomial(table, 1, name)


def _random_positive_trig(rng, degree: int, name: str):
    table, total = {}, 0.0
    for k in range(1, degree + 1):
        c = complex(rng.normal(), rng.normal()) / k
        table[k], table[-k] = c, np.conj(c)
        total += 2 * abs(c)
    # constant term at least the sum of the moduli keeps g >= 0
    table[0] = total * (1.0 + rng.uniform(0.0, 0.5)) + 1e-3
    return trig_polynomial(table, 1, name)


@_timed(10, "generalized eigenvalues inside (r, R)")
def c10_lemma(pairs: int = 50, seed: int = 2024, **_):
    rng = np.random.default_rng(seed)
    bad, worst = 0, 0.0
    for i in range(pairs):
        f = _random_real_trig(rng, int(rng.integers(1, 6)), f"f{i}")
        g = _random_positive_trig(rng, int(rng.integers(1, 6)), f"g{i}")
        rep = check_eigfunction_lemma(f, g, 128)
        bad += not rep.passed
        worst = max(worst, rep.bound_check.max_violation)
    return bad == 0, f"{pairs - bad}/{pairs} pairs inside; worst violation {worst:.1e}", {}


def _structural_case(rng) -> list:
    """Run every structural property on one random operator; return failures."""
    errors = []
    p = int(rng.integers(1, 3))
    dims = tuple(int(rng.integers(1, 9 if p == 2 else 65)) for _ in range(p))
    shape = tuple(2 * n - 1 for n in dims)
    coeffs = rng.normal(size=shape)
    if rng.random() < 0.3:
        coeffs = coeffs + 1j * rng.normal(size=shape)
    T = MultilevelToeplitzOperator(coeffs, dims)
    x = rng.normal(size=T.size)

    if not np.array_equal(flip(dims, flip(dims, x)), x):
        errors.append("flip involution")
    D = T.dense()
    S = D[::-1]
    if np.max(np.abs(S - S.T), initial=0.0) >= 1e-14 * max(1.0, np.abs(S).max()):
        errors.append("symmetrized dense symmetry")
    ref = D @ x
    if np.linalg.norm(T.matvec(x) - ref) > 1e-12 * max(np.linalg.norm(ref), 1e-300):
        errors.append("fft matvec")
    if not np.allclose(symmetrized_apply(T, x), ref[::-1], rtol=1e-12, atol=1e-12):
        errors.append("symmetrized apply")

    if T.is_real:
        # diagonally dominant copy for the solver checks
        c = coeffs.copy()
        centre = tuple(n - 1 for n in dims)
        c[centre] = np.abs(c).sum() + 1.0
        A = MultilevelToeplitzOperator(c, dims)
        Ad = A.dense()
        b = rng.normal(size=A.size)
        n = A.size
        sym = Ad[::-1]
        m = minres(sym, b, None, tol=1e-10, maxit=n + 1)
        g = gmres_right(Ad, b, None, tol=1e-10, maxit=n + 1)
        ls = lsqr(Ad, b, None, tol=1e-10, maxit=n + 1)
        if np.any(np.diff(m.residual_history) > 1e-12):
            errors.append("minres monotone")
        if np.any(np.diff(g.residual_history) > 1e-12):
            errors.append("gmres monotone")
        for name, rep in (("minres", m), ("gmres", g), ("lsqr", ls)):
            if not rep.converged:
                errors.append(f"{name} finite termination")
    return errors


@_timed(11, "structural property fuzzing")
def c11_structural(cases: int = 1000, seed: int = 7, **_):
    rng = np.random.default_rng(seed)
    failures = {}
    for _ in range(cases):
        for e in _structural_case(rng):
            failures[e] = failures.get(e, 0) + 1
    return not failures, f"{cases} cases" + (f"; failures {failures}" if failures else
                                             ", no failures"), failures


CRITERIA = (c01_table4, c02_symeigs, c03_multilevel, c04_absfeigs, c05_strang_curve,
            c06_table1, c07_table2, c08_table3, c09_table5, c10_lemma, c11_structural)
SUITES = {
    "theorems": (c01_table4, c02_symeigs, c03_multilevel, c04_absfeigs, c05_strang_curve,
                 c10_lemma, c11_structural),
    "tables": (c06_table1, c07_table2, c08_table3, c09_table5),
}


def run_suite(name: str, **opts) -> list:
    """Run every criterion of suite ``name`` (or ``"all"``)."""
    checks = CRITERIA if name == "all" else SUITES[name]
    return [check(**opts) for check in checks]
