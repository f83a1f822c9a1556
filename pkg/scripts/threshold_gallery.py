#!/usr/bin/env python3
"""Emit designed threshold schedules across the prediction range.

With the defaults, the four predictions land in design cases I, II, and III
(low, middle, and high relative to the worst-case threshold band), so the
gallery shows how the schedule reshapes as the predicted extreme moves.
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
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.94,
                    help="confidence in the worst-case fallback "
                         "(default: %(default)s)")
    ap.add_argument("--predictions", default="8,12,15,25",
                    help="comma-separated predicted extremes "
                         "(default: %(default)s)")
    ap.add_argument("--outdir", default="results/thresholds")
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for prediction in args.predictions.split(","):
        out = outdir / f"schedule_{args.kind}_P{prediction}.csv"
        code = ksearch([
            "thresholds", "--kind", args.kind,
            "--pmin", str(args.pmin), "--pmax", str(args.pmax),
            "--k", str(args.k), "--lambda", str(args.lam),
            "--prediction", prediction, "--output", str(out),
        ])
        if code:
            return code
        case = next(
            line.split("case=", 1)[1].split()[0]
            for line in out.read_text().splitlines()
            if "case=" in line
        )
        print(f"wrote {out} (case {case})")
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
