"""Two single-antenna transmitters sharing one message.

Over two slots the transmitters send a rho-mixed space-time block (rho = 0
is the Alamouti layout). After matched combining the receiver sees two
parallel channels with gain |h1 + rho h2|^2 + (1 - rho^2)|h2|^2, the same
quadratic form as a 2 x 1 MISO link with covariance (P/2)[[1, rho], [rho, 1]].
"""

from dataclasses import dataclass
import math

import numpy as np

from . import specfun
from .optimize import find_root
from .channel import McConfig, complex_normal, estimate, mc_map, empirical_throughput
from .rates_miso import (ClBoundaries, cl_boundary_residuals, miso_expected_rate_k,
                         miso_throughput_max)


@dataclass(frozen=True)
class SchemeParams:
    rho: float
    P: float

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")
        if self.P < 0:
            raise ValueError("power must be non-negative")

    @property
    def delta(self):
        return (self.rho + 1.0) / 2.0

    @property
    def per_transmitter_power(self):
        return self.P / 2.0


@dataclass(frozen=True)
class TwoSlotBlock:
    """tx[k, j]: symbol of transmitter k in slot j; rx[j]: received sample.

    Channel coefficients may be scalars or arrays (one block per entry).
    """

    tx: np.ndarray
    rx: np.ndarray
    h1: object
    h2: object
    rho: float


@dataclass(frozen=True)
class Decoded:
    symbols: np.ndarray
    gain: object
    degenerate: object


def encode_two_slot(x_t, x_t1, params):
    """Transmit symbols for one block, shape (2, 2) (+ broadcast shape)."""
    rho = params.rho
    c = math.sqrt(max(1.0 - rho * rho, 0.0))
    x_t = np.asarray(x_t, dtype=complex)
    x_t1 = np.asarray(x_t1, dtype=complex)
    return np.array([
        [x_t, -np.conj(x_t1)],
        [rho * x_t + c * x_t1, -rho * np.conj(x_t1) + c * np.conj(x_t)],
    ])


def transmit_two_slot(tx, h1, h2, rho, noise=(0.0, 0.0)):
    """Pass an encoded block through flat fading held over both slots."""
    rx = np.array([h1 * tx[0, 0] + h2 * tx[1, 0] + noise[0],
                   h1 * tx[0, 1] + h2 * tx[1, 1] + noise[1]])
    return TwoSlotBlock(np.asarray(tx), rx, h1, h2, float(rho))


def combining_matrix(h1, h2, rho):
    """G with [r1, -r2*] = G [x_t, x_t1]; G^H G = h I."""
    c = math.sqrt(max(1.0 - rho * rho, 0.0))
    a = h1 + h2 * rho
    b = h2 * c
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def decode_two_slot(block):
    """Matched combining by G^H, then division by the gain h.

    The symbol estimates carry noise power 1/h when the channel noise is
    unit-variance. Blocks with h = 0 are flagged degenerate and decode to nan.
    """
    c = math.sqrt(max(1.0 - block.rho ** 2, 0.0))
    a = block.h1 + block.h2 * block.rho
    b = block.h2 * c
    y0, y1 = block.rx[0], -np.conj(block.rx[1])
    combined = np.array([np.conj(a) * y0 - b * y1, np.conj(b) * y0 + a * y1])
    gain = np.abs(a) ** 2 + np.abs(b) ** 2
    degenerate = gain == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        symbols = np.where(degenerate, np.nan + 0j, combined / np.where(degenerate, 1.0, gain))
    if np.ndim(gain) == 0:
        return Decoded(symbols, float(gain), bool(degenerate))
    return Decoded(symbols, gain, degenerate)


def decoded_snr_mc(h1, h2, rho, P, cfg):
    """Symbol-level estimate of the post-combining SNR for a fixed channel.

    Symbols carry power P/2 and the channel noise is CN(0, 1). Returns the
    ratio of mean symbol power to mean estimation-error power.
    """
    params = SchemeParams(rho, P)

    def draw(rng, count):
        x = complex_normal(rng, (2, count)) * math.sqrt(params.per_transmitter_power)
        z = complex_normal(rng, (2, count))
        block = transmit_two_slot(encode_two_slot(x[0], x[1], params), h1, h2, rho, noise=z)
        err = decode_two_slot(block).symbols - x
        return np.stack([np.abs(x[0]) ** 2 + np.abs(x[1]) ** 2,
                         np.abs(err[0]) ** 2 + np.abs(err[1]) ** 2], axis=1)

    data = mc_map(draw, cfg)
    return float(data[:, 0].sum() / data[:, 1].sum())


def effective_gain(h1, h2, rho):
    """Post-combining gain |h1 + rho h2|^2 + (1 - rho^2)|h2|^2."""
    return np.abs(h1 + rho * h2) ** 2 + np.abs(h2) ** 2 * (1.0 - rho * rho)


def miso_quadratic_gain(h1, h2, rho):
    """h C h^H with C = [[1, rho], [rho, 1]], evaluated as a matrix product."""
    h = np.stack([np.asarray(h1), np.asarray(h2)], axis=-1)[..., None, :]
    C = np.array([[1.0, rho], [rho, 1.0]])
    return (h @ C @ np.conj(np.swapaxes(h, -1, -2)))[..., 0, 0].real


def expanded_gain(h1, h2, rho):
    return np.abs(h1) ** 2 + np.abs(h2) ** 2 + 2.0 * rho * np.real(h1 * np.conj(h2))


def _draw_pair(rng, count):
    h = complex_normal(rng, (count, 2))
    return h[:, 0], h[:, 1]


def dist_outage_mc(rho, P, R, cfg):
    def draw(rng, count):
        h1, h2 = _draw_pair(rng, count)
        return (np.log1p(expanded_gain(h1, h2, rho) * P / 2.0) < R).astype(float)

    return estimate(mc_map(draw, cfg), cfg)


def dist_outage_analytic(rho, P, R, cfg=None):
    """Outage probability at rate R.

    Exact for rho in {0, +1, -1}; Monte Carlo mean otherwise.
    """
    if R <= 0:
        return 0.0
    x = 2.0 * math.expm1(R) / P
    if rho == 0:
        return 1.0 - math.exp(-x) * (1.0 + x)
    if abs(rho) == 1:
        # |h1 +- h2|^2 is exponential with mean 2
        return -math.expm1(-x / 2.0)
    return dist_outage_mc(rho, P, R, cfg or McConfig()).mean


@dataclass(frozen=True)
class EquivalenceReport:
    rho: float
    P: float
    R: float
    scheme: object
    miso: object
    mismatches: int
    max_gain_gap: float

    @property
    def difference(self):
        return self.scheme.mean - self.miso.mean


def equivalence_check(rho, P, R, cfg, miso_seed=None):
    """Outage of the two-slot scheme against the 2 x 1 MISO covariance form.

    With ``miso_seed`` unset both sides see the same draws and the per-draw
    outage indicators are compared; otherwise the MISO side is re-drawn
    with its own seed.
    """
    params = SchemeParams(rho, P)
    snr = params.per_transmitter_power

    def draw_scheme(rng, count):
        h1, h2 = _draw_pair(rng, count)
        x = complex_normal(rng, (2, count)) * math.sqrt(snr)
        block = transmit_two_slot(encode_two_slot(x[0], x[1], params), h1, h2, rho)
        gain = decode_two_slot(block).gain
        return np.stack([gain, h1.real, h1.imag, h2.real, h2.imag], axis=1)

    def draw_miso(rng, count):
        h1, h2 = _draw_pair(rng, count)
        return miso_quadratic_gain(h1, h2, rho)

    scheme_data = mc_map(draw_scheme, cfg)
    g_scheme = scheme_data[:, 0]
    if miso_seed is None:
        h1 = scheme_data[:, 1] + 1j * scheme_data[:, 2]
        h2 = scheme_data[:, 3] + 1j * scheme_data[:, 4]
        g_miso = miso_quadratic_gain(h1, h2, rho)
        miso_cfg = cfg
    else:
        miso_cfg = McConfig(cfg.samples, miso_seed, cfg.workers)
        g_miso = mc_map(draw_miso, miso_cfg)
    # degenerate blocks (gain 0) fall below any positive rate: counted as outage
    out_scheme = np.log1p(g_scheme * snr) < R
    out_miso = np.log1p(g_miso * snr) < R
    mismatches = int(np.count_nonzero(out_scheme != out_miso)) if miso_seed is None else -1
    gap = float(np.max(np.abs(g_scheme - g_miso))) if miso_seed is None else float("nan")
    return EquivalenceReport(rho, P, R, estimate(out_scheme.astype(float), cfg),
                             estimate(out_miso.astype(float), miso_cfg), mismatches, gap)


def rho_scan(P, R, cfg, rhos=None):
    """MC outage over a rho grid on common draws; returns [(rho, McEstimate)]."""
    if rhos is None:
        rhos = [round(0.1 * k, 10) for k in range(11)]
    return [(rho, dist_outage_mc(rho, P, R, cfg)) for rho in rhos]


def best_rho(P, R, cfg, rhos=None):
    """Grid point with the lowest MC outage; returns ``(rho, McEstimate)``."""
    return min(rho_scan(P, R, cfg, rhos), key=lambda item: (item[1].mean, item[0]))


def endpoint_crossover():
    """x = 2(e^R - 1)/P at which the rho = 0 and rho = 1 outages coincide.

    Solves e^{-x}(1 + x) = e^{-x/2}, i.e. ln(1 + x) = x / 2, for x > 0.
    Below it rho = 0 has the lower outage of the two endpoints, above it
    rho = 1 does.
    """
    return find_root(lambda x: math.log1p(x) - 0.5 * x, (1.0, 10.0), tol=0.0)


def endpoint_preference(P, R):
    """Which endpoint, rho = 0 or rho = 1, has the lower exact outage."""
    return 0.0 if dist_outage_analytic(0.0, P, R) <= dist_outage_analytic(1.0, P, R) else 1.0


# -- closed forms for two transmitters ------------------------------------

GOLDEN_S1 = (1.0 + math.sqrt(5.0)) / 2.0


def dist_cl_s0(P, polish=True):
    """Lower layering boundary, the positive root of (P/2)s^3 + s^2 - s - 1 = 0.

    Cardano's formula with the principal complex cube root (the discriminant
    changes sign as P decreases). Its terms grow like 1/P and cancel, so by
    default Newton steps on the cubic restore full precision. The cubic is
    convex for s > 0 and positive at the golden ratio, so Newton started at
    or right of the root converges monotonically; that start is used when
    the formula lands outside (0, golden ratio].
    """
    if P <= 0:
        raise specfun.DomainError("power must be positive")
    A = 1.0 / P - 2.0 / (3.0 * P ** 2) - 8.0 / (27.0 * P ** 3)
    B = 2.0 / (3.0 * P) + 4.0 / (9.0 * P ** 2)
    root = complex(A * A - B ** 3) ** 0.5
    c = (root + A) ** (1.0 / 3.0)
    s = float((c + B / c).real) - 2.0 / (3.0 * P)
    if polish:
        if not 0 < s <= GOLDEN_S1:
            s = GOLDEN_S1
        for _ in range(200):
            f = ((0.5 * P * s + 1.0) * s - 1.0) * s - 1.0
            step = f / ((1.5 * P * s + 2.0) * s - 1.0)
            s -= step
            if abs(step) <= 4 * np.finfo(float).eps * s:
                break
    return s


def dist_cl_expected_rate(P):
    s0, s1 = dist_cl_s0(P), GOLDEN_S1
    e1 = specfun.exp_integral_e1
    return (3.0 * e1(s0) + (1.0 - s0) * math.exp(-s0)
            - 3.0 * e1(s1) - (1.0 - s1) * math.exp(-s1))


def dist_cl_residual(P, polish=True):
    return cl_boundary_residuals(2, P / 2.0, ClBoundaries(dist_cl_s0(P, polish), GOLDEN_S1))


def dist_ergodic(P):
    """1 + (1 - 2/P) e^{2/P} E1(2/P)."""
    if P <= 0:
        raise specfun.DomainError("power must be positive")
    return 1.0 + (1.0 - 2.0 / P) * specfun.exp_e1_scaled(2.0 / P)


def dist_throughput(P):
    """max over s of (1 + 2s) e^{-2s} ln(1 + P s)."""
    return miso_throughput_max(2, P)


def dist_throughput_mc(rho, P, cfg):
    """Empirical maximum throughput of the two-slot scheme at a fixed rho."""
    def draw(rng, count):
        h1, h2 = _draw_pair(rng, count)
        return np.log1p(effective_gain(h1, h2, rho) * P / 2.0)

    return empirical_throughput(mc_map(draw, cfg), cfg)


@dataclass(frozen=True)
class Fig2Row:
    P: float
    throughput: float
    two_layer: float
    continuous_layer: float
    ergodic: float


def fig2_curves(P_grid, restarts=20, seed=0):
    rows = []
    for P in P_grid:
        one = dist_throughput(P)
        plan, two = miso_expected_rate_k(2, P, 2, restarts=restarts, seed=seed)
        rows.append(Fig2Row(float(P), one.value, two, dist_cl_expected_rate(P),
                            dist_ergodic(P)))
    return rows
