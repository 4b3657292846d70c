"""Closed-form-versus-oracle acceptance checks.

Each ``criterion_*`` function runs one group of comparisons and returns a
``Criterion`` holding its sub-checks. ``run_suite`` runs them all; the
``fast`` level uses 10^5 Monte Carlo samples where the full level uses 10^6.
"""

from dataclasses import dataclass, field
import math
import random
import time

import numpy as np
from scipy import integrate, special

from . import specfun
from .channel import DEFAULT_SEED, McConfig, mc_ergodic, mc_expected_rate, mc_outage, mc_throughput
from . import dist_antenna as da
from . import rates_mimo as rm
from . import rates_miso as rs

LEVEL_SAMPLES = {"fast": 100_000, "full": 1_000_000}


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    allowed: float
    passed: bool

    @classmethod
    def bound(cls, name, measured, allowed, strict=False):
        measured = float(measured)
        ok = measured < allowed if strict else measured <= allowed
        return cls(name, measured, float(allowed), bool(ok))

    def line(self):
        tag = "ok  " if self.passed else "FAIL"
        return f"  {tag} {self.name}: measured {self.measured:.3e}, allowed {self.allowed:.3e}"


@dataclass
class Criterion:
    number: int
    title: str
    budget_s: float
    checks: list = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def worst(self):
        ratios = [c.measured / c.allowed if c.allowed > 0 else
                  (0.0 if c.passed else math.inf) for c in self.checks]
        return max(ratios, default=math.inf)

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.number:2d} {self.title}: {len(self.checks)} checks, "
                f"worst measured/allowed {self.worst:.3g}, {self.elapsed_s:.1f}s "
                f"(budget {self.budget_s:g}s)")

    def failures(self):
        return [c for c in self.checks if not c.passed]


def _mc(samples, seed, workers=1):
    return McConfig(samples, seed, workers)


def _mc_bound(name, est, target, slack=0.0, k=3.0):
    return CheckResult.bound(name, abs(est.mean - target), k * est.stderr + slack)


# -- 1 ----------------------------------------------------------------------

def criterion_special_functions(samples=None, seed=DEFAULT_SEED, workers=1):
    crit = Criterion(1, "special-function identities", 1.0)
    rnd = random.Random(seed)
    worst = 0.0
    for _ in range(1000):
        x = rnd.uniform(-1.0 / math.e, 10.0)
        w = specfun.lambert_w0(x)
        worst = max(worst, abs(w * math.exp(w) - x) / max(1.0, abs(x)))
    crit.checks.append(CheckResult.bound("lambert W0 residual, 1000 points", worst, 1e-12))

    worst = 0.0
    for n in range(1, 12):
        for x in (0.01, 0.5, 1.0, 3.0, 10.0, 30.0):
            lhs = specfun.upper_incomplete_gamma(n + 1, x)
            rhs = n * specfun.upper_incomplete_gamma(n, x) + x ** n * math.exp(-x)
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    crit.checks.append(CheckResult.bound("incomplete gamma recurrence (rel)", worst, 1e-10))

    worst = 0.0
    for x in (0.05, 0.3, 0.9, 1.0, 1.5, 4.0, 12.0):
        h = 1e-5 * x
        fd = (specfun.exp_integral_e1(x + h) - specfun.exp_integral_e1(x - h)) / (2 * h)
        exact = -math.exp(-x) / x
        worst = max(worst, abs(fd - exact) / abs(exact))
    crit.checks.append(CheckResult.bound("E1 derivative (rel)", worst, 1e-6))

    worst = max(abs(specfun.q_function(z) + specfun.q_function(-z) - 1.0)
                for z in np.linspace(-8.0, 8.0, 321))
    crit.checks.append(CheckResult.bound("Q(z) + Q(-z) = 1", worst, 1e-14))
    return crit


# -- 2 ----------------------------------------------------------------------

def criterion_ergodic(samples=LEVEL_SAMPLES["full"], seed=DEFAULT_SEED, workers=1):
    crit = Criterion(2, "MISO ergodic capacity closed form", 60.0)
    cfg = _mc(samples, seed, workers)
    for nt in (1, 2, 4):
        for P in (0.1, 1.0, 10.0):
            closed = rs.miso_ergodic(nt, P)
            crit.checks.append(_mc_bound(f"nt={nt} P={P} vs MC",
                                         mc_ergodic(nt, 1, P, cfg), closed))
            quad, _ = integrate.quad(rs.ergodic_integrand(nt, P / nt), 0.0, np.inf,
                                     epsabs=1e-13, epsrel=1e-13, limit=200)
            crit.checks.append(CheckResult.bound(f"nt={nt} P={P} vs quadrature",
                                                 abs(quad - closed), 1e-8))
    return crit


# -- 3 ----------------------------------------------------------------------

def criterion_throughput(samples=LEVEL_SAMPLES["full"], seed=DEFAULT_SEED, workers=1):
    crit = Criterion(3, "MISO maximum throughput", 120.0)
    for P in (0.5, math.e, 10.0, 100.0):
        s_closed, v_closed = rs.siso_throughput_closed(P)
        res = rs.miso_throughput_max(1, P)
        crit.checks.append(CheckResult.bound(f"SISO argmax P={P:.4g}",
                                             abs(res.argmax - s_closed), 1e-6))
    cfg = _mc(samples, seed, workers)
    for nt in (2, 4):
        for P in (1.0, 10.0):
            res = rs.miso_throughput_max(nt, P)
            rate = res.info["rate"]
            out = mc_outage(nt, 1, P, rate, cfg)
            success = type(out)(rate * (1.0 - out.mean), rate * out.stderr,
                                out.samples, out.seed)
            crit.checks.append(_mc_bound(f"nt={nt} P={P} vs MC success x rate",
                                         success, res.value))
    for nt in (2, 3, 4):
        for P in (1.0, 10.0):
            values = [rs.miso_throughput_max(lt, P).value for lt in range(1, nt + 1)]
            best = int(np.argmax(values)) + 1
            # measured: best smaller array minus the full array, must be negative
            crit.checks.append(CheckResult.bound(
                f"full array nt={nt} P={P} (best l_t={best})",
                max(values[:-1]) - values[-1], 0.0, strict=True))
    return crit


# -- 4 ----------------------------------------------------------------------

def _k2_grid_value(nt, P, s1, s2, p1):
    p2 = P - p1
    q1 = special.gammaincc(nt, nt * s1)
    q2 = special.gammaincc(nt, nt * s2)
    return q1 * np.log1p(p1 * s1 / (1.0 + p2 * s1)) + q2 * np.log1p(p2 * s2)


def brute_force_k2(nt, P, points=161, zooms=4):
    """Dense grid maximum of the two-layer objective, refined by zooming."""
    lo = np.array([1e-6, 1e-6, 0.0])
    hi = np.array([1.0, 1.0, P])
    best_v, best_x = -np.inf, None
    n = points
    for _ in range(zooms + 1):
        axes = [np.linspace(lo[k], hi[k], n) for k in range(3)]
        s1, s2 = np.meshgrid(axes[0], axes[1], indexing="ij")
        for p1 in axes[2]:
            v = _k2_grid_value(nt, P, s1, s2, p1)
            j = np.unravel_index(np.argmax(v), v.shape)
            if v[j] > best_v:
                best_v, best_x = float(v[j]), np.array([s1[j], s2[j], p1])
        step = (hi - lo) / (n - 1)
        lo = np.maximum(best_x - 3 * step, [1e-9, 1e-9, 0.0])
        hi = np.minimum(best_x + 3 * step, [1.0, 1.0, P])
        n = 41
    return best_v, best_x


def criterion_k_layer(samples=LEVEL_SAMPLES["full"], seed=DEFAULT_SEED, workers=1):
    crit = Criterion(4, "two-layer expected rate", 180.0)
    cfg = _mc(samples, seed, workers)
    P = 10.0
    for nt in (1, 2):
        plan, value = rs.miso_expected_rate_k(nt, P, 2)
        grid_value, _ = brute_force_k2(nt, P)
        crit.checks.append(CheckResult.bound(f"nt={nt} optimizer vs dense grid",
                                             abs(value - grid_value), 1e-4))
        crit.checks.append(_mc_bound(f"nt={nt} plan MC expected rate",
                                     mc_expected_rate(nt, plan, cfg), value))
    return crit


# -- 5 ----------------------------------------------------------------------

def criterion_continuous_layer(samples=None, seed=DEFAULT_SEED, workers=1):
    crit = Criterion(5, "continuous-layer closed form", 5.0)
    worst_fd, worst_quad, worst_res = 0.0, 0.0, 0.0
    for nt in (1, 2, 4):
        for P in (1.0, 10.0, 100.0):
            b = rs.solve_cl_boundaries(nt, P)
            worst_res = max(worst_res, *map(abs, rs.cl_boundary_residuals(nt, P / nt, b)))
            for s in np.linspace(b.s0, b.s1, 7):
                h = 1e-5 * s
                fd = (rs.cl_antiderivative(nt, s + h) - rs.cl_antiderivative(nt, s - h)) / (2 * h)
                exact = rs.cl_integrand(nt, s)
                worst_fd = max(worst_fd, abs(fd - exact) / max(abs(exact), 1e-300))
            quad, _ = integrate.quad(lambda s: rs.cl_integrand(nt, s), b.s0, b.s1,
                                     epsabs=1e-13, epsrel=1e-13, limit=200)
            worst_quad = max(worst_quad, abs(quad - rs.miso_cl_expected_rate(nt, P)))
    crit.checks.append(CheckResult.bound("antiderivative finite difference (rel)", worst_fd, 1e-6))
    crit.checks.append(CheckResult.bound("closed form vs quadrature", worst_quad, 1e-8))
    crit.checks.append(CheckResult.bound("boundary residuals", worst_res, 1e-9))
    return crit


# -- 6 ----------------------------------------------------------------------

BOUND_GRID = [(nt, P) for nt in (1, 2, 4) for P in (0.1, 1.0, 10.0, 100.0)]


def bound_chain(nt, P):
    return (rs.miso_throughput_max(nt, P).value, rs.miso_expected_rate_k(nt, P, 2)[1],
            rs.miso_cl_expected_rate(nt, P), rs.miso_ergodic(nt, P))


def _chain_checks(label, one, two, cl, erg):
    return [
        CheckResult.bound(f"{label} throughput <= two-layer", one - two, 1e-6),
        CheckResult.bound(f"{label} two-layer <= continuous", two - cl, 1e-4),
        CheckResult.bound(f"{label} continuous <= ergodic", cl - erg, 1e-9),
    ]


def criterion_bound_chain(samples=None, seed=DEFAULT_SEED, workers=1):
    crit = Criterion(6, "bound chain", 60.0)
    for nt, P in BOUND_GRID:
        crit.checks.extend(_chain_checks(f"nt={nt} P={P}", *bound_chain(nt, P)))
    return crit


# -- 7 ----------------------------------------------------------------------

def criterion_wishart(samples=LEVEL_SAMPLES["full"], seed=DEFAULT_SEED, workers=1):
    crit = Criterion(7, "Wishart log-det moments", 60.0)
    cfg = _mc(samples, seed, workers)
    for n in range(1, 7):
        for p in range(1, n + 1):
            shape = rm.WishartShape(p, n)
            mean, var = rm.wishart_logdet_moments(shape)
            x = rm.bartlett_logdet_samples(shape, cfg)
            N = x.size
            se_mean = x.std(ddof=1) / math.sqrt(N)
            centered = (x - x.mean()) ** 2
            se_var = centered.std(ddof=1) / math.sqrt(N)
            crit.checks.append(CheckResult.bound(f"p={p} n={n} mean",
                                                 abs(x.mean() - mean), 3 * se_mean))
            crit.checks.append(CheckResult.bound(f"p={p} n={n} variance",
                                                 abs(x.var(ddof=1) - var), 3 * se_var))
    return crit


# -- 8 ----------------------------------------------------------------------

MODEL_BUDGET = 0.02


def criterion_high_snr(samples=LEVEL_SAMPLES["full"], seed=DEFAULT_SEED, workers=1):
    crit = Criterion(8, "high-SNR Gaussian model", 120.0)
    cfg = _mc(samples, seed, workers)
    P = 1000.0
    for nt, nr in ((2, 2), (2, 4)):
        gauss = rm.hisnr_throughput(nt, nr, P).value
        _, est = rm.hisnr_throughput_mc(nt, nr, P, cfg)
        crit.checks.append(_mc_bound(f"({nt},{nr}) Gaussian vs Bartlett MC", est, gauss,
                                     slack=MODEL_BUDGET * abs(gauss)))
    return crit


# -- 9 ----------------------------------------------------------------------

def criterion_large_arrays(samples=LEVEL_SAMPLES["fast"], seed=DEFAULT_SEED, workers=1):
    crit = Criterion(9, "large-array Gaussian models", 180.0)
    # fixed at 10^5 samples at both levels
    cfg = _mc(LEVEL_SAMPLES["fast"], seed, workers)
    for nt, nr, P, fn in ((64, 2, 10.0, rm.large_nt_throughput),
                          (2, 64, 1.0, rm.large_nr_throughput)):
        model = fn(nt, nr, P).value
        _, est = mc_throughput(nt, nr, P, cfg)
        crit.checks.append(_mc_bound(f"({nt},{nr},P={P}) model vs MC", est, model,
                                     slack=MODEL_BUDGET * abs(model)))
    return crit


# -- 10 ---------------------------------------------------------------------

def criterion_distributed(samples=LEVEL_SAMPLES["full"], seed=DEFAULT_SEED, workers=1):
    crit = Criterion(10, "distributed-antenna equivalence", 60.0)
    cfg = _mc(samples, seed, workers)
    for rho in (0.0, 0.5, 1.0):
        for P, R in ((10.0, 1.0), (1.0, 0.5)):
            rep = da.equivalence_check(rho, P, R, cfg)
            crit.checks.append(CheckResult.bound(
                f"rho={rho} P={P} R={R} indicator mismatches", rep.mismatches, 0))
            crit.checks.append(CheckResult.bound(
                f"rho={rho} P={P} R={R} outage difference", abs(rep.difference), 0.0))
            if rho == 0.0:
                crit.checks.append(_mc_bound(f"rho=0 P={P} R={R} vs analytic outage",
                                             rep.scheme, da.dist_outage_analytic(0.0, P, R)))
    worst_res, worst_cl, worst_s0 = 0.0, 0.0, 0.0
    for P in (0.1, 1.0, 2.0, 10.0, 100.0):
        worst_res = max(worst_res, *map(abs, da.dist_cl_residual(P, polish=False)))
        worst_cl = max(worst_cl, abs(da.dist_cl_expected_rate(P) - rs.miso_cl_expected_rate(2, P)))
        worst_s0 = max(worst_s0, abs(da.dist_cl_s0(P, polish=False)
                                     - rs.solve_cl_boundaries(2, P).s0))
    crit.checks.append(CheckResult.bound("cubic s0 boundary residual (unpolished)", worst_res,
                                         1e-9))
    crit.checks.append(CheckResult.bound("cubic s0 vs bisection", worst_s0, 1e-9))
    crit.checks.append(CheckResult.bound("two-transmitter vs 2x1 continuous layer",
                                         worst_cl, 1e-9))
    crit.checks.append(CheckResult.bound("ergodic at P=2 equals 1",
                                         abs(da.dist_ergodic(2.0) - 1.0), 0.0))
    return crit


# -- 11 ---------------------------------------------------------------------

FIG2_DB = list(range(-10, 31, 2))
FIG1_NR = 4
FIG1_NT = list(range(1, 9))
FIG1_DB = list(range(-10, 31, 5))


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def criterion_figures(samples=LEVEL_SAMPLES["fast"], seed=DEFAULT_SEED, workers=1):
    crit = Criterion(11, "figure reproductions", 600.0)
    rows = da.fig2_curves([db_to_linear(d) for d in FIG2_DB])
    for r in rows:
        crit.checks.extend(_chain_checks(f"fig2 P={r.P:.4g}", r.throughput, r.two_layer,
                                         r.continuous_layer, r.ergodic))
    # desk-scale surface, fixed at 10^5 samples at both levels
    cfg = _mc(LEVEL_SAMPLES["fast"], seed, workers)
    cells = rm.mimo_throughput_surface(FIG1_NT, FIG1_NR, [db_to_linear(d) for d in FIG1_DB], cfg)
    by_nt = {}
    for c in cells:
        by_nt.setdefault(c.nt, []).append(c)
        crit.checks.append(CheckResult.bound(
            f"fig1 nt={c.nt} P={c.P:.4g} throughput <= ergodic",
            c.value - c.ergodic, 3 * c.ergodic_stderr))
    for nt, row in by_nt.items():
        drop = max((a.value - b.value for a, b in zip(row, row[1:])), default=0.0)
        crit.checks.append(CheckResult.bound(f"fig1 nt={nt} monotone in P", drop, 0.0))
    return crit


CRITERIA = (
    criterion_special_functions,
    criterion_ergodic,
    criterion_throughput,
    criterion_k_layer,
    criterion_continuous_layer,
    criterion_bound_chain,
    criterion_wishart,
    criterion_high_snr,
    criterion_large_arrays,
    criterion_distributed,
    criterion_figures,
)


def run_criterion(fn, level="full", seed=DEFAULT_SEED, workers=1):
    t0 = time.perf_counter()
    crit = fn(samples=LEVEL_SAMPLES[level], seed=seed, workers=workers)
    crit.elapsed_s = time.perf_counter() - t0
    return crit


def run_suite(level="fast", seed=DEFAULT_SEED, workers=1, only=None):
    """Run all criteria (or the numbers in ``only``); returns a list of Criterion."""
    if level not in LEVEL_SAMPLES:
        raise ValueError(f"level must be one of {sorted(LEVEL_SAMPLES)}")
    out = []
    for k, fn in enumerate(CRITERIA, start=1):
        if only is None or k in only:
            out.append(run_criterion(fn, level, seed, workers))
    return out
