"""Map arrival time and steering effort over the backstepping gain grid.

Sweeps (c1, c2) for the basic backstepping law from one start state, prints
an arrival-time table with the peak steering rate per cell, and writes the
full grid CSV. Cells outside the admissible gain region come back as
skipped rows, which is the quickest way to see the min(c1, c2) > 1 boundary.

    python3 scripts/gain_sweep_study.py --workers 4 --out gains.csv
"""

import argparse
import sys

from polarpark import PolarState, Scenario, LawVariant, run_sweep, sweep_csv

C1_GRID = [0.8, 1.01, 1.2, 1.6, 2.5]
C2_GRID = [0.8, 1.01, 1.5, 3.0, 5.0]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="gain_sweep.csv", help="grid CSV path")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--delta0", type=float, default=0.5)
    ap.add_argument("--gamma0", type=float, default=-0.9)
    args = ap.parse_args(argv)

    base = Scenario(variant=LawVariant.BACKSTEP, c1=1.01, c2=5.0, v=0.5,
                    initial=PolarState(1.0, args.delta0, args.gamma0),
                    cutoff=0.01)
    result = run_sweep(base, {"c1": C1_GRID, "c2": C2_GRID},
                       workers=args.workers)

    header = "c1 \\ c2 " + "".join(f"{c2:>12.2f}" for c2 in C2_GRID)
    print(header)
    rows = iter(result.rows)
    for c1 in C1_GRID:
        cells = []
        for _ in C2_GRID:
            r = next(rows)
            if r.status != "ok":
                cells.append(f"{'-':>12}")
            else:
                cells.append(f"{r.cutoff_time:7.2f}/{r.max_abs_omega:.2f}")
        print(f"{c1:7.2f} " + "".join(cells))
    print("cell format: arrival time / peak |omega|; '-' = inadmissible gains")

    with open(args.out, "w", encoding="utf-8") as f:
        f.write(sweep_csv(result))
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
