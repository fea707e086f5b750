"""Dump the preconditioned spectra behind the eigenvalue figures.

Writes ``<prefix>_{ar,am}_{nonsym,symmetrized}.txt`` for Example 1, one
``re im`` pair per line, ready for any plotting tool.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from symtoep.bench import RunConfig, export_spectrum


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2047)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    args = ap.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    for tag, precond in (("ar", "ar"), ("am", "am-exact")):
        cfg = RunConfig("ex1", (args.n,), "minres", precond)
        for target in ("nonsym", "symmetrized"):
            path = export_spectrum(cfg, target, args.out / f"ex1_{tag}_{target}.txt")
            print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
