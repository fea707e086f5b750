"""Experiment harness: build problems, run solver/preconditioner pairs, persist rows."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, SizeCapError
from .krylov import LinearOperatorHandle, SolveReport, gmres_right, lsqr, minres
from .preconditioners import MGOverrides, abs_toeplitz, check_compatible, make_preconditioner
from .problems import ProblemInstance, example1, example2, example3
from .spectral import EIG_CAP, write_spectrum
from .toeplitz import symmetric_part

__all__ = [
    "RunConfig",
    "ResultRow",
    "build_problem",
    "symmetrized_handle",
    "solve",
    "run",
    "run_many",
    "write_rows",
    "read_rows",
    "render_table",
    "preconditioned_eigs",
    "export_spectrum",
    "worker_count",
]

EXAMPLES = ("ex1", "ex2", "ex3")
SOLVERS = ("minres", "gmres", "lsqr")
_DEFAULTS = {
    "ex1": {},
    "ex2": {"alpha": 1.5, "d_plus": 0.5, "d_minus": 1.0},
    "ex3": {"alpha": 1.5, "beta": 1.75, "d_plus": 2.0, "d_minus": 0.5,
            "e_plus": 0.3, "e_minus": 1.0},
}


@dataclass(frozen=True)
class RunConfig:
    """One (example, solver, preconditioner) experiment over several sizes.

    For ``ex3`` each size is the per-axis ``n`` (``n^2`` unknowns).
    """

    example: str
    sizes: tuple
    solver: str
    precond: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    d_plus: Optional[float] = None
    d_minus: Optional[float] = None
    e_plus: Optional[float] = None
    e_minus: Optional[float] = None
    tol: float = 1e-8
    maxit: int = 200
    seed: int = 0
    rhs_dist: str = "uniform"
    mg_sweeps: Optional[int] = None
    mg_omega: Optional[float] = None
    mg_coarsest: Optional[int] = None

    def __post_init__(self):
        if self.example not in EXAMPLES:
            raise ConfigError(f"unknown example {self.example!r}")
        sizes = tuple(int(n) for n in np.atleast_1d(self.sizes))
        if not sizes or min(sizes) < 1:
            raise ConfigError("need at least one positive size")
        object.__setattr__(self, "sizes", sizes)
        for key, value in _DEFAULTS[self.example].items():
            if getattr(self, key) is None:
                object.__setattr__(self, key, value)
        if not 0 < self.tol < 1:
            raise ConfigError(f"tol={self.tol} outside (0, 1)")
        if self.maxit < 1:
            raise ConfigError("maxit must be positive")
        check_compatible(self.solver, self.precond, self.example)

    @property
    def mg(self) -> MGOverrides:
        return MGOverrides(self.mg_sweeps, self.mg_omega, self.mg_coarsest)


@dataclass
class ResultRow:
    example: str
    n: int
    unknowns: int
    solver: str
    precond: str
    alpha: Optional[float]
    beta: Optional[float]
    d_plus: Optional[float]
    d_minus: Optional[float]
    e_plus: Optional[float]
    e_minus: Optional[float]
    tol: float
    maxit: int
    seed: int
    iterations: int
    converged: bool
    flag: str
    final_residual: float
    wall_seconds: float
    setup_seconds: float
    operator_applications: int
    preconditioner_solves: int


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ResultRow)}


def build_problem(cfg: RunConfig, n: int) -> ProblemInstance:
    if cfg.example == "ex1":
        return example1(n, cfg.seed, cfg.rhs_dist)
    if cfg.example == "ex2":
        return example2(n, cfg.alpha, cfg.d_plus, cfg.d_minus)
    return example3(n, cfg.alpha, cfg.beta, cfg.d_plus, cfg.d_minus, cfg.e_plus, cfg.e_minus)


def symmetrized_handle(A) -> LinearOperatorHandle:
    """``Y A`` as a symmetric operator."""
    return LinearOperatorHandle(A.size, lambda x: A.matvec(x)[::-1].copy(),
                                lambda x: A.matvec(x)[::-1].copy(), True)


def solve(problem: ProblemInstance, solver: str, P, tol: float = 1e-8,
          maxit: int = 200) -> SolveReport:
    """MINRES on ``Y A x = Y b``; GMRES and LSQR on ``A x = b``."""
    A, b = problem.operator, problem.rhs
    if solver == "minres":
        return minres(symmetrized_handle(A), b[::-1].copy(), P, tol=tol, maxit=maxit)
    if solver == "gmres":
        return gmres_right(A, b, P, tol=tol, maxit=maxit)
    if solver == "lsqr":
        return lsqr(A, b, P, tol=tol, maxit=maxit)
    raise ConfigError(f"unknown solver {solver!r}")


def _run_size(cfg: RunConfig, n: int) -> ResultRow:
    problem = build_problem(cfg, n)
    P, setup = make_preconditioner(cfg.precond, problem, cfg.solver, cfg.mg)
    rep = solve(problem, cfg.solver, P, cfg.tol, cfg.maxit)
    return ResultRow(
        cfg.example, n, problem.size, cfg.solver, cfg.precond, cfg.alpha, cfg.beta,
        cfg.d_plus, cfg.d_minus, cfg.e_plus, cfg.e_minus, cfg.tol, cfg.maxit, cfg.seed,
        rep.iterations, rep.converged, rep.flag, rep.true_residual, rep.wall_seconds,
        setup, rep.operator_applications, rep.preconditioner_solves)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("SYMTOEP_THREADS", "1")))
    except ValueError as exc:
        raise ConfigError("SYMTOEP_THREADS must be an integer") from exc


def run(cfg: RunConfig, workers: Optional[int] = None) -> list:
    """One row per size, in the order of ``cfg.sizes``."""
    return run_many([cfg], workers)


def run_many(configs: Sequence[RunConfig], workers: Optional[int] = None) -> list:
    jobs = [(cfg, n) for cfg in configs for n in cfg.sizes]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [_run_size(cfg, n) for cfg, n in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: _run_size(*job), jobs))


def _encode(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _decode(name: str, text: str):
    kind = _FIELD_TYPES[name]
    if text == "":
        return None if "Optional" in str(kind) else text
    if "bool" in str(kind):
        return text == "True"
    if "int" in str(kind):
        return int(text)
    if "float" in str(kind):
        return float(text)
    return text


def write_rows(rows: Iterable[ResultRow], target=None, fmt: str = "csv") -> str:
    """Serialise rows as CSV or JSON lines; also writes ``target`` if given."""
    rows = list(rows)
    names = list(_FIELD_TYPES)
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow([_encode(getattr(row, k)) for k in names])
    elif fmt == "json":
        for row in rows:
            buf.write(json.dumps(dataclasses.asdict(row)) + "\n")
    elif fmt == "table":
        buf.write(render_table(rows))
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text, encoding="utf-8")
    return text


def read_rows(source, fmt: Optional[str] = None) -> list:
    """Parse CSV or JSON lines written by :func:`write_rows`."""
    path = Path(source)
    text = path.read_text(encoding="utf-8")
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "csv"
    if fmt == "json":
        return [ResultRow(**json.loads(line)) for line in text.splitlines() if line.strip()]
    reader = csv.DictReader(io.StringIO(text))
    return [ResultRow(**{k: _decode(k, v) for k, v in rec.items()}) for rec in reader]


def _label(row: ResultRow) -> str:
    parts = [row.example]
    for key in ("alpha", "beta", "d_plus", "d_minus", "e_plus", "e_minus"):
        value = getattr(row, key)
        if value is not None:
            parts.append(f"{key}={value:g}")
    return " ".join(parts)


def render_table(rows: Sequence[ResultRow]) -> str:
    """Sizes down, ``solver/precond`` across; cells are ``its (seconds)``.

    Runs that hit ``maxit`` show ``---``.
    """
    rows = list(rows)
    if not rows:
        return ""
    columns = list(dict.fromkeys(f"{r.solver}/{r.precond}" for r in rows))
    blocks = list(dict.fromkeys(_label(r) for r in rows))
    lines = []
    for block in blocks:
        mine = [r for r in rows if _label(r) == block]
        sizes = list(dict.fromkeys(r.n for r in mine))
        lines.append(block)
        header = ["n"] + columns
        body = []
        for n in sizes:
            cells = [str(n)]
            for col in columns:
                hit = [r for r in mine if r.n == n and f"{r.solver}/{r.precond}" == col]
                if not hit:
                    cells.append("")
                elif not hit[0].converged:
                    cells.append("---")
                else:
                    r = hit[0]
                    cells.append(f"{r.iterations} ({r.wall_seconds + r.setup_seconds:.2g})")
            body.append(cells)
        widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
        for line in [header] + body:
            lines.append("  ".join(c.rjust(w) for c, w in zip(line, widths)))
        lines.append("")
    return "\n".join(lines)


def preconditioned_eigs(A: np.ndarray, P: np.ndarray, target: str) -> np.ndarray:
    """Eigenvalues of ``P^{-1} A`` (``nonsym``) or ``P^{-1} Y A`` (``symmetrized``)."""
    if target == "nonsym":
        ev = sla.eigvals(A, P)
        return ev[np.lexsort((ev.imag, ev.real))]
    if target == "symmetrized":
        S = A[::-1]
        return sla.eigh(0.5 * (S + S.T), P, eigvals_only=True).astype(complex)
    raise ConfigError(f"unknown spectrum target {target!r}")


def export_spectrum(cfg: RunConfig, target: str, path) -> Path:
    """Dump the preconditioned spectrum for the first size of ``cfg``.

    Supported preconditioners are the ones with a dense form: ``none``,
    ``ar`` and ``am-exact``.
    """
    n = cfg.sizes[0]
    problem = build_problem(cfg, n)
    if problem.size > EIG_CAP:
        raise SizeCapError(f"spectrum export limited to {EIG_CAP} unknowns")
    A = problem.operator.dense(EIG_CAP)
    if cfg.precond == "none":
        P = np.eye(problem.size)
    elif cfg.precond == "ar":
        P = symmetric_part(problem.operator).dense(EIG_CAP)
    elif cfg.precond == "am-exact":
        P = abs_toeplitz(problem).dense(EIG_CAP)
    else:
        raise ConfigError(f"spectrum export does not support {cfg.precond!r}")
    return write_spectrum(path, preconditioned_eigs(A, P, target))
