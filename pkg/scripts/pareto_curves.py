#!/usr/bin/env python3
"""Tabulate the consistency-robustness frontier for several budgets.

Writes one CSV per budget (via the ``ksearch pareto`` subcommand), so the
curves can be compared across k at a fixed price band.
"""

from __future__ import annotations

import argparse
import pathlib

from ksearch.cli import main as ksearch


def run() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", choices=("max", "min"), default="max")
    ap.add_argument("--pmin", type=float, default=5.0)
    ap.add_argument("--pmax", type=float, default=50.0)
    ap.add_argument("--points", type=int, default=101)
    ap.add_argument("--budgets", default="1,5,20,100",
                    help="comma-separated k values (default: %(default)s)")
    ap.add_argument("--outdir", default="results/pareto")
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for k in (int(v) for v in args.budgets.split(",")):
        out = outdir / f"frontier_{args.kind}_k{k}.csv"
        code = ksearch([
            "pareto", "--kind", args.kind,
            "--pmin", str(args.pmin), "--pmax", str(args.pmax),
            "--k", str(k), "--points", str(args.points),
            "--output", str(out),
        ])
        if code:
            return code
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
