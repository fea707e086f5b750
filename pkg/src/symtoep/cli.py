"""Command-line entry point: ``symtoep`` or ``python -m symtoep``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .bench import EXAMPLES, SOLVERS, RunConfig, export_spectrum, run, write_rows
from .errors import SymtoepError
from .preconditioners import PRECONDITIONERS

__all__ = ["build_parser", "main", "verify"]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="symtoep",
        description="Solve symmetrized Toeplitz systems and reproduce the benchmark tables.")
    ap.add_argument("--example", choices=EXAMPLES, default="ex1")
    ap.add_argument("--n", type=int, action="append", dest="sizes",
                    help="problem size (per axis for ex3); repeat for several")
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--beta", type=float)
    ap.add_argument("--dplus", type=float)
    ap.add_argument("--dminus", type=float)
    ap.add_argument("--eplus", type=float)
    ap.add_argument("--eminus", type=float)
    ap.add_argument("--solver", choices=SOLVERS, default="minres")
    ap.add_argument("--precond", choices=PRECONDITIONERS, default="ar")
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--maxit", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rhs", choices=("uniform", "normal"), default="uniform",
                    help="distribution of the random ex1 right-hand side")
    ap.add_argument("--mg-sweeps", type=int, help="pre- and post-smoothing steps")
    ap.add_argument("--mg-omega", type=float, help="Jacobi damping factor")
    ap.add_argument("--mg-coarsest", type=int, help="coarsest grid size per axis")
    ap.add_argument("--out", type=Path, help="write results here instead of stdout")
    ap.add_argument("--format", choices=("csv", "json", "table"), default="table")
    ap.add_argument("--verify", choices=("theorems", "tables", "all"),
                    help="run an acceptance suite and exit nonzero on failure")
    ap.add_argument("--epsilon-scale", type=float, default=1.0,
                    help="scale the inclusion bound in --verify theorems (fault injection)")
    ap.add_argument("--export-spectrum", type=Path, metavar="PATH",
                    help="write the preconditioned spectrum of the first size")
    ap.add_argument("--spectrum-target", choices=("nonsym", "symmetrized"),
                    default="symmetrized")
    return ap


def config_from_args(args) -> RunConfig:
    sizes = tuple(args.sizes) if args.sizes else ((31,) if args.example == "ex3" else (1023,))
    return RunConfig(
        example=args.example, sizes=sizes, solver=args.solver, precond=args.precond,
        alpha=args.alpha, beta=args.beta, d_plus=args.dplus, d_minus=args.dminus,
        e_plus=args.eplus, e_minus=args.eminus, tol=args.tol, maxit=args.maxit,
        seed=args.seed, rhs_dist=args.rhs, mg_sweeps=args.mg_sweeps,
        mg_omega=args.mg_omega, mg_coarsest=args.mg_coarsest)


def verify(suite: str, report_path=None, **opts) -> int:
    """Run an acceptance suite, print one line per check and write a JSON report."""
    from .acceptance import format_result, run_suite

    results = run_suite(suite, **opts)
    for res in results:
        print(format_result(res))
    if report_path is not None:
        payload = [{k: v for k, v in dataclasses.asdict(r).items() if k != "data"}
                   for r in results]
        Path(report_path).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verify:
            return verify(args.verify, args.out, maxit=args.maxit,
                          epsilon_scale=args.epsilon_scale)
        cfg = config_from_args(args)
        if args.export_spectrum:
            path = export_spectrum(cfg, args.spectrum_target, args.export_spectrum)
            print(f"wrote {path}")
            return 0
        rows = run(cfg)
        text = write_rows(rows, args.out, args.format)
        if args.out is None:
            sys.stdout.write(text)
        return 0
    except SymtoepError as exc:
        print(f"symtoep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
