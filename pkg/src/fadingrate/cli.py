"""Command-line front end: parameter sweeps to CSV and the verification suite.

    fadingrate sweep --quantity throughput --nt 2 --P 0.1,1,10
    fadingrate fig2 --out fig2.csv
    fadingrate verify --level fast

Settings resolve as flags > FR_* environment variables > --config file >
defaults. All values are in nats unless ``--bits`` is given.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import io
import math
import os
import sys

from . import dist_antenna as da
from . import rates_mimo as rm
from . import rates_miso as rs
from .channel import DEFAULT_SEED, McConfig, mc_ergodic, mc_throughput
from .checks import run_suite

QUANTITIES = ("throughput", "expected-rate-k", "cl-expected-rate", "ergodic",
              "mimo-asymptotic", "dist-sim", "mimo-surface")
REGIMES = ("exact-miso", "low-snr", "high-snr", "large-nt", "large-nr")
ALLOWED_REGIMES = {
    "throughput": ("exact-miso", "low-snr"),
    "expected-rate-k": ("exact-miso", "low-snr"),
    "cl-expected-rate": ("exact-miso", "low-snr"),
    "ergodic": ("exact-miso",),
    "mimo-asymptotic": ("low-snr", "high-snr", "large-nt", "large-nr"),
    "dist-sim": ("exact-miso",),
    "mimo-surface": ("exact-miso",),
}
HEADER = "quantity,nt,nr,K,rho,P,value_nats,argmax,stderr,seed"


class SpecError(ValueError):
    """Inconsistent sweep specification; ``field`` names the offending input."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class SweepSpec:
    quantity: str
    P: tuple
    nt: tuple = (1,)
    nr: tuple = (1,)
    K: tuple = (1,)
    rho: tuple = (0.0,)
    regime: str = None
    mc: McConfig = field(default_factory=McConfig)

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise SpecError("quantity", f"unknown quantity {self.quantity!r}")
        regime = self.regime or ALLOWED_REGIMES[self.quantity][0]
        if regime not in REGIMES:
            raise SpecError("regime", f"unknown regime {regime!r}")
        if regime not in ALLOWED_REGIMES[self.quantity]:
            raise SpecError("regime", f"{regime!r} is not valid for {self.quantity!r}; "
                                      f"use one of {ALLOWED_REGIMES[self.quantity]}")
        object.__setattr__(self, "regime", regime)
        for name in ("P", "nt", "nr", "K", "rho"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise SpecError(name, "grid is empty")
            object.__setattr__(self, name, vals)
        if any(not (p > 0 and math.isfinite(p)) for p in self.P):
            raise SpecError("P", "powers must be positive and finite")
        for name in ("nt", "nr", "K"):
            if any(int(v) != v or v < 1 for v in getattr(self, name)):
                raise SpecError(name, "must be positive integers")
        if any(not -1.0 <= r <= 1.0 for r in self.rho):
            raise SpecError("rho", "must lie in [-1, 1]")
        self._check_shape(regime)

    def _check_shape(self, regime):
        q = self.quantity
        if q in ("throughput", "expected-rate-k", "cl-expected-rate") and regime == "exact-miso":
            if self.nr != (1,):
                raise SpecError("nr", f"{q} with regime exact-miso needs nr = 1")
        if q == "dist-sim" and (self.nt != (2,) or self.nr != (1,)):
            raise SpecError("nt", "dist-sim is defined for nt = 2, nr = 1")
        if q != "expected-rate-k" and self.K != (1,):
            raise SpecError("K", f"K applies only to expected-rate-k, not {q}")
        if q != "dist-sim" and self.rho != (0.0,):
            raise SpecError("rho", f"rho applies only to dist-sim, not {q}")

    def cells(self):
        for nt in self.nt:
            for nr in self.nr:
                for K in self.K:
                    for rho in self.rho:
                        for P in self.P:
                            yield int(nt), int(nr), int(K), float(rho), float(P)


@dataclass(frozen=True)
class ResultRow:
    quantity: str
    nt: int
    nr: int
    P: float
    value: float
    K: int = None
    rho: float = None
    argmax: object = None
    stderr: float = None
    seed: int = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise SpecError("P", f"{self.quantity} is not finite at nt={self.nt}, "
                                 f"nr={self.nr}, P={self.P}")

    def csv(self, bits=False):
        scale = 1.0 / math.log(2.0) if bits else 1.0
        cols = [self.quantity, self.nt, self.nr, self.K, _num(self.rho), _num(self.P),
                _num(self.value * scale), _argmax(self.argmax),
                _num(None if self.stderr is None else self.stderr * scale), self.seed]
        return ",".join("" if c is None else (c if isinstance(c, str) else str(c))
                        for c in cols)


def _num(x):
    return None if x is None else format(float(x), ".12g")


def _argmax(a):
    if a is None:
        return None
    if isinstance(a, (tuple, list)) and a and isinstance(a[0], (tuple, list)):
        # layer plans: thresholds/powers
        return "/".join(";".join(_num(v) for v in part) for part in a)
    if isinstance(a, (tuple, list)):
        return ";".join(_num(v) for v in a)
    return _num(a)


def _cell(spec, nt, nr, K, rho, P):
    q, regime = spec.quantity, spec.regime
    cfg = McConfig(spec.mc.samples, spec.mc.seed, 1)
    base = dict(quantity=q, nt=nt, nr=nr, P=P)
    if q == "throughput":
        res = rs.miso_throughput_max(nt, P) if regime == "exact-miso" else \
            rm.lowsnr_throughput(nt, nr, P)
        return ResultRow(value=res.value, argmax=res.argmax, **base)
    if q == "expected-rate-k":
        if regime == "exact-miso":
            plan, value = rs.miso_expected_rate_k(nt, P, K)
        else:
            plan, value = rm.lowsnr_expected_rate_k(nt, nr, P, K)
        return ResultRow(value=value, K=K, argmax=(plan.thresholds, plan.powers), **base)
    if q == "cl-expected-rate":
        if regime == "exact-miso":
            b, value = rs.solve_cl_boundaries(nt, P), rs.miso_cl_expected_rate(nt, P)
        else:
            b, value = rs.cl_boundaries(nt * nr, P / nt), rm.lowsnr_cl_expected_rate(nt, nr, P)
        return ResultRow(value=value, argmax=(b.s0, b.s1), **base)
    if q == "ergodic":
        if nr == 1:
            return ResultRow(value=rs.miso_ergodic(nt, P), **base)
        if nt == 1:
            return ResultRow(value=rs.simo_ergodic(nr, P), **base)
        est = mc_ergodic(nt, nr, P, cfg)
        return ResultRow(value=est.mean, stderr=est.stderr, seed=cfg.seed, **base)
    if q == "mimo-asymptotic":
        fn = {"low-snr": rm.lowsnr_throughput, "high-snr": rm.hisnr_throughput,
              "large-nt": rm.large_nt_throughput, "large-nr": rm.large_nr_throughput}[regime]
        res = fn(nt, nr, P)
        if not res.info.get("valid", True):
            print(f"warning: {regime} model outside its validity range at nt={nt}, "
                  f"nr={nr}, P={P:g}", file=sys.stderr)
        return ResultRow(value=res.value, argmax=res.argmax, **base)
    if q == "dist-sim":
        rate, est = da.dist_throughput_mc(rho, P, cfg)
        return ResultRow(value=est.mean, rho=rho, argmax=rate, stderr=est.stderr,
                         seed=cfg.seed, **base)
    if q == "mimo-surface":
        rate, est = mc_throughput(nt, nr, P, cfg)
        return ResultRow(value=est.mean, argmax=rate, stderr=est.stderr, seed=cfg.seed, **base)
    raise SpecError("quantity", q)


def run_sweep(spec):
    """Evaluate every grid cell; rows come back in grid order.

    Cells run concurrently on ``spec.mc.workers`` threads. Monte Carlo cells
    all use the same seed, so cells differing only in P share channel draws.
    """
    cells = list(spec.cells())
    if spec.mc.workers == 1 or len(cells) == 1:
        return [_cell(spec, *c) for c in cells]
    with ThreadPoolExecutor(max_workers=spec.mc.workers) as pool:
        return list(pool.map(lambda c: _cell(spec, *c), cells))


def fig2_rows(P_grid):
    """Four two-transmitter curves per power, in grid order."""
    rows = []
    for r in da.fig2_curves(P_grid):
        common = dict(nt=2, nr=1, P=r.P)
        rows += [ResultRow("throughput", value=r.throughput, **common),
                 ResultRow("expected-rate-k", value=r.two_layer, K=2, **common),
                 ResultRow("cl-expected-rate", value=r.continuous_layer, **common),
                 ResultRow("ergodic", value=r.ergodic, **common)]
    return rows


def format_csv(rows, bits=False):
    buf = io.StringIO()
    buf.write(HEADER + "\n")
    for r in rows:
        buf.write(r.csv(bits) + "\n")
    return buf.getvalue()


def write_csv(rows, out=None, bits=False):
    text = format_csv(rows, bits)
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)


# -- argument parsing -------------------------------------------------------

def parse_grid(text, cast=float):
    """Comma list of values or ranges ``start:stop:step`` (inclusive).

    A trailing ``dB`` on a value or a whole range converts from decibels.
    """
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        db = item.lower().endswith("db")
        if db:
            item = item[:-2]
        if ":" in item:
            parts = [float(x) for x in item.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError(f"range must be start:stop:step with step > 0, got {item!r}")
            start, stop, step = parts
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            vals = [start + k * step for k in range(n)]
        else:
            vals = [float(item)]
        for v in vals:
            v = 10.0 ** (v / 10.0) if db else v
            out.append(cast(round(v)) if cast is int else cast(v))
    return out


def read_config(path):
    """Flat ``key = value`` file; keys are flag names without dashes."""
    conf = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SpecError("config", f"{path}:{n}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            conf[k.replace("-", "_")] = v
    return conf


# (name, default, environment variable)
SETTINGS = {
    "quantity": ("throughput", None),
    "nt": ("1", None),
    "nr": ("1", None),
    "K": ("1", None),
    "P": ("0:30:5dB", None),
    "rho": ("0", None),
    "regime": (None, None),
    "samples": ("100000", "FR_SAMPLES"),
    "seed": (str(DEFAULT_SEED), "FR_SEED"),
    "workers": ("1", None),
    "out": (None, None),
    "level": ("fast", None),
}

COMMAND_DEFAULTS = {
    "fig1": {"quantity": "mimo-surface", "nr": "4", "nt": "1:8:1", "P": "-10:30:5dB"},
    "fig2": {"P": "-10:30:2dB"},
}


def resolve(args, command):
    """Merge flags, environment, config file and defaults."""
    conf = read_config(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for name, (default, env) in SETTINGS.items():
        flag = getattr(args, name, None)
        if flag is not None:
            merged[name] = flag
        elif env and os.environ.get(env):
            merged[name] = os.environ[env]
        elif name in conf:
            merged[name] = conf[name]
        else:
            merged[name] = COMMAND_DEFAULTS.get(command, {}).get(name, default)
    merged["bits"] = bool(getattr(args, "bits", False)) or \
        conf.get("bits", "").lower() in ("1", "true", "yes")
    return merged


def _mc_config(s):
    try:
        return McConfig(int(float(s["samples"])), int(str(s["seed"]), 0), int(s["workers"]))
    except ValueError as exc:
        raise SpecError("samples/seed/workers", str(exc)) from None


def spec_from_settings(s):
    def grid(name, cast=float):
        try:
            return tuple(parse_grid(s[name], cast))
        except ValueError as exc:
            raise SpecError(name, str(exc)) from None

    return SweepSpec(quantity=s["quantity"], P=grid("P"), nt=grid("nt", int),
                     nr=grid("nr", int), K=grid("K", int), rho=grid("rho"),
                     regime=s["regime"], mc=_mc_config(s))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file mirroring the flags")
    common.add_argument("--samples", help="Monte Carlo samples (env FR_SAMPLES)")
    common.add_argument("--seed", help="Monte Carlo seed, decimal or 0x-hex (env FR_SEED)")
    common.add_argument("--workers", help="worker threads")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--P", help="powers: list, ranges start:stop:step, optional dB suffix")
    grid.add_argument("--out", help="CSV output path (default stdout)")
    grid.add_argument("--bits", action="store_true", default=None,
                      help="report values in bits instead of nats")

    parser = argparse.ArgumentParser(prog="fadingrate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", parents=[common, grid], help="parameter sweep to CSV")
    sw.add_argument("--quantity", help=f"one of {', '.join(QUANTITIES)}")
    sw.add_argument("--nt", help="transmit antennas (list or range)")
    sw.add_argument("--nr", help="receive antennas (list or range)")
    sw.add_argument("--K", help="layers for expected-rate-k")
    sw.add_argument("--rho", help="power-split parameter in [-1, 1] for dist-sim")
    sw.add_argument("--regime", help=f"one of {', '.join(REGIMES)}")

    f1 = sub.add_parser("fig1", parents=[common, grid],
                        help="MIMO throughput surface (default nr=4, nt=1..8)")
    f1.add_argument("--nt")
    f1.add_argument("--nr")
    sub.add_parser("fig2", parents=[common, grid], help="two-transmitter rate curves")

    ve = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    ve.add_argument("--level", choices=("fast", "full"))
    ve.add_argument("--only", help="comma list of criterion numbers")
    return parser


def _verify(s, only):
    cfg = _mc_config(s)
    numbers = set(parse_grid(only, int)) if only else None
    results = run_suite(s["level"], seed=cfg.seed, workers=cfg.workers, only=numbers)
    for crit in results:
        print(crit.summary())
        for c in crit.checks:
            print(c.line())
    failed = [c.number for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        s = resolve(args, args.command)
        if args.command == "verify":
            return _verify(s, args.only)
        if args.command == "fig2":
            P = parse_grid(s["P"])
            if not P or any(p <= 0 for p in P):
                raise SpecError("P", "powers must be positive")
            rows = fig2_rows(P)
        else:
            rows = run_sweep(spec_from_settings(s))
        write_csv(rows, s["out"], s["bits"])
    except SpecError as exc:
        parser.error(str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
