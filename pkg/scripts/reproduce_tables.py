"""Regenerate the iteration-count tables.

    python scripts/reproduce_tables.py table1 table5
    python scripts/reproduce_tables.py all --max-n 65535 --out results/

Each table prints in the ``its (seconds)`` layout; with ``--out`` the raw
rows are also saved as CSV. Sizes above ``--max-n`` unknowns are skipped,
so the default run finishes in a few minutes on a laptop.

Table 2's exact ``A_n`` columns (one iteration by construction) are not
rerun.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from symtoep.acceptance import TABLE4, TABLE4_N, TABLE4_WEIGHTS, table4_epsilons
from symtoep.bench import RunConfig, render_table, run_many, write_rows

EX1_SIZES = (1023, 2047, 4095, 8191)
EX2_SIZES = (1023, 4095, 16383, 65535, 262143)
EX2_WEIGHT_SIZES = (4095, 16383, 65535, 262143)
EX3_SIZES = (31, 127, 511)


@dataclass(frozen=True)
class TablePreset:
    """Columns as ``(solver, precond)`` pairs, swept over parameter blocks."""

    example: str
    sizes: tuple
    columns: tuple
    blocks: tuple = ({},)
    extra: dict = field(default_factory=dict)

    def configs(self, max_unknowns: int) -> list:
        dim = 2 if self.example == "ex3" else 1
        sizes = tuple(n for n in self.sizes if n ** dim <= max_unknowns)
        if not sizes:
            return []
        return [RunConfig(self.example, sizes, solver, precond, **params, **self.extra)
                for params in self.blocks for solver, precond in self.columns]


PRESETS = {
    "table1": TablePreset("ex1", EX1_SIZES, (
        ("gmres", "circ-optimal"), ("gmres", "ar"),
        ("lsqr", "circ-optimal"), ("lsqr", "ar"),
        ("minres", "circ-abs-optimal"), ("minres", "ar"))),
    "table2": TablePreset("ex1", EX1_SIZES, (
        ("gmres", "mg-a"), ("lsqr", "mg-am"), ("minres", "am-exact"), ("minres", "mg-am"))),
    "table3": TablePreset("ex2", EX2_SIZES, (
        ("gmres", "circ-strang"), ("gmres", "mg-a"),
        ("lsqr", "circ-strang"), ("lsqr", "mg-a"),
        ("minres", "circ-abs-strang"), ("minres", "mg-am"), ("minres", "mg-ar")),
        tuple({"alpha": a, "d_plus": 0.5, "d_minus": 1.0} for a in (1.25, 1.5, 1.75))),
    "table3-weights": TablePreset("ex2", EX2_WEIGHT_SIZES, (
        ("gmres", "circ-strang"), ("gmres", "mg-a"),
        ("lsqr", "circ-strang"), ("lsqr", "mg-a"),
        ("minres", "circ-abs-strang"), ("minres", "mg-am"), ("minres", "mg-ar")),
        tuple({"alpha": 1.5, "d_plus": dp, "d_minus": dm}
              for dp, dm in ((0.0, 3.0), (1.0, 3.0), (1.0, 1.0)))),
    "table5": TablePreset("ex3", EX3_SIZES, (
        ("gmres", "block-circ"), ("gmres", "mg-a"),
        ("lsqr", "block-circ"), ("lsqr", "mg-a"),
        ("minres", "block-circ-abs"), ("minres", "mg-ar")),
        tuple({"alpha": 1.5, "beta": b} for b in (1.25, 1.75))),
}
ORDER = ("table1", "table2", "table3", "table3-weights", "table4", "table5")


def epsilon_table() -> str:
    eps = table4_epsilons()
    head = "alpha  " + "  ".join(f"({dp:g},{dm:g})".rjust(14) for dp, dm in TABLE4_WEIGHTS)
    lines = [f"epsilon bound, n={TABLE4_N} (ours / reference)", head]
    for alpha, ref in TABLE4.items():
        cells = [f"{eps[(alpha, dp, dm)]:.2f} / {r:.2f}".rjust(14)
                 for (dp, dm), r in zip(TABLE4_WEIGHTS, ref)]
        lines.append(f"{alpha:<5g}  " + "  ".join(cells))
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("tables", nargs="+", choices=ORDER + ("all",))
    ap.add_argument("--max-n", type=int, default=65535,
                    help="skip sizes with more unknowns than this")
    ap.add_argument("--out", type=Path, help="directory for CSV output")
    args = ap.parse_args(argv)

    names = ORDER if "all" in args.tables else args.tables
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    for name in names:
        print(f"== {name} ==")
        if name == "table4":
            print(epsilon_table())
            continue
        rows = run_many(PRESETS[name].configs(args.max_n))
        print(render_table(rows))
        if args.out:
            write_rows(rows, args.out / f"{name}.csv", "csv")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
