"""Run every bundled preset and collect the CSV traces and SVG plots.

Each preset is one figure-style experiment: the overlaid runs land in
<out>/<preset>_*.csv and <out>/<preset>_{xy,omega,angles[,v]}.svg, and the
certificate report for every run is printed as it completes. Exits nonzero
if any certificate fails.

    python3 scripts/reproduce_figures.py --out figures/
"""

import argparse
import sys

from polarpark import preset_names
from polarpark.cli import main as cli_main


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures", help="output directory")
    ap.add_argument("--only", nargs="*", default=None,
                    help="subset of preset names (default: all)")
    args = ap.parse_args(argv)

    names = args.only if args.only else preset_names()
    worst = 0
    for name in names:
        print(f"== {name}")
        worst = max(worst, cli_main(["preset", name, "--out-dir", args.out]))
    return worst


if __name__ == "__main__":
    sys.exit(main())
