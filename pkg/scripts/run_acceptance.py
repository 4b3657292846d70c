"""Run the acceptance criteria and print one line per criterion.

    python3 scripts/run_acceptance.py --level full
"""

import argparse
import sys

from fadingrate.checks import run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--level", choices=["fast", "full"], default="full")
    ap.add_argument("--only", type=int, nargs="*")
    ap.add_argument("--verbose", action="store_true", help="print every check")
    args = ap.parse_args()

    results = run_suite(args.level, only=set(args.only) if args.only else None)
    for crit in results:
        print(crit.summary())
        for c in crit.checks if args.verbose else crit.failures():
            print(c.line())
    return 0 if all(c.passed for c in results) else 1


if __name__ == "__main__":
    sys.exit(main())
