"""Two-transmitter curves: one layer, two layers, continuum of layers, ergodic.

    python3 scripts/fig2_curves.py --out fig2.csv
"""

import argparse
import csv
import sys

from fadingrate.checks import FIG2_DB, db_to_linear
from fadingrate.dist_antenna import fig2_curves


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--db", type=float, nargs="*", default=FIG2_DB,
                    help="power grid in dB")
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    rows = fig2_curves([db_to_linear(d) for d in args.db], restarts=args.restarts)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["P_dB", "one_layer", "two_layer", "continuous", "ergodic"])
    for db, r in zip(args.db, rows):
        w.writerow([f"{db:g}", f"{r.throughput:.6f}", f"{r.two_layer:.6f}",
                    f"{r.continuous_layer:.6f}", f"{r.ergodic:.6f}"])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
