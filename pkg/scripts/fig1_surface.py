"""Monte Carlo maximum-throughput surface over (nt, P) for a fixed receive array.

    python3 scripts/fig1_surface.py --nr 4 --samples 100000 --out fig1.csv
"""

import argparse
import csv
import sys

from fadingrate.channel import DEFAULT_SEED, McConfig
from fadingrate.checks import FIG1_DB, FIG1_NR, FIG1_NT, db_to_linear
from fadingrate.rates_mimo import mimo_throughput_surface


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nr", type=int, default=FIG1_NR)
    ap.add_argument("--nt-max", type=int, default=max(FIG1_NT))
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    cfg = McConfig(args.samples, args.seed, args.workers)
    powers = [db_to_linear(d) for d in FIG1_DB]
    cells = mimo_throughput_surface(range(1, args.nt_max + 1), args.nr, powers, cfg)

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["nt", "nr", "P_dB", "throughput", "stderr", "rate", "ergodic"])
    for c, db in zip(cells, FIG1_DB * args.nt_max):
        w.writerow([c.nt, c.nr, db, f"{c.value:.6f}", f"{c.stderr:.2e}", f"{c.rate:.6f}",
                    f"{c.ergodic:.6f}"])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
