"""Rayleigh channel sampling and Monte Carlo estimators.

Every closed form in the package has a Monte Carlo counterpart here. The
random stream is counter-based: sample ``i`` is drawn from a Philox stream
keyed by the seed whose counter is set by the block ``i // BLOCK``, so a
sample set depends only on ``(seed, samples)`` and never on how the work is
split across workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

BLOCK = 8192
DEFAULT_SEED = 0x5EEDCAFE


@dataclass(frozen=True)
class McConfig:
    samples: int = 100_000
    seed: int = DEFAULT_SEED
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def within(self, target, k=3.0, slack=0.0):
        """True if ``target`` lies within ``k`` standard errors (plus slack)."""
        return abs(self.mean - target) <= k * self.stderr + slack


@dataclass(frozen=True)
class ChannelRealization:
    """One block-fading draw H, shape (nr, nt)."""

    entries: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=complex)
        if h.ndim != 2:
            raise ValueError("channel matrix must be 2-D (nr, nt)")
        if not np.all(np.isfinite(h)):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "entries", h)

    @property
    def nr(self):
        return self.entries.shape[0]

    @property
    def nt(self):
        return self.entries.shape[1]


def block_rng(seed, block):
    """Generator for one fixed-size block of sample indices."""
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 128))


def complex_normal(rng, shape):
    """CN(0,1) draws: real and imaginary parts N(0, 1/2)."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)


def sample_channel(nt, nr, rng):
    return ChannelRealization(complex_normal(rng, (nr, nt)))


def sample_channels(nt, nr, count, rng):
    """Batch of ``count`` channel matrices, shape (count, nr, nt)."""
    return complex_normal(rng, (count, nr, nt))


def mc_map(fn, cfg):
    """Evaluate ``fn(rng, count)`` over all sample blocks, in index order.

    ``fn`` must return one value per sample along axis 0. The result is the
    concatenation over blocks, so any reduction applied afterwards is
    bit-identical for every worker count.
    """
    nblocks = -(-cfg.samples // BLOCK)

    def run(b):
        count = min(BLOCK, cfg.samples - b * BLOCK)
        return np.asarray(fn(block_rng(cfg.seed, b), count))

    if cfg.workers == 1 or nblocks == 1:
        parts = [run(b) for b in range(nblocks)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(run, range(nblocks)))
    return np.concatenate(parts, axis=0)


def estimate(values, cfg):
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(mean, stderr, n, cfg.seed)


def as_powers(nt, powers):
    """Per-antenna powers; a scalar is split equally over ``nt`` antennas."""
    p = np.asarray(powers, dtype=float)
    if p.ndim == 0:
        p = np.full(nt, float(p) / nt)
    if p.shape != (nt,):
        raise ValueError(f"expected {nt} per-antenna powers, got shape {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("powers must be finite and non-negative")
    return p


def _logdet_eye_plus(gram):
    # ln det(I + G) for a batch of Hermitian PSD G via Cholesky
    m = gram.shape[-1]
    if m == 1:
        return np.log1p(gram[..., 0, 0].real)
    a = gram + np.eye(m)
    chol = np.linalg.cholesky(a)
    diag = np.diagonal(chol, axis1=-2, axis2=-1).real
    return 2.0 * np.log(diag).sum(axis=-1)


def mutual_information(H, powers):
    """ln det(I + H diag(powers) H^H) in nats.

    ``H`` is a ChannelRealization or an array of shape (..., nr, nt); batches
    return an array. The Gram matrix of the smaller dimension is used.
    """
    h = H.entries if isinstance(H, ChannelRealization) else np.asarray(H)
    nr, nt = h.shape[-2:]
    p = as_powers(nt, powers)
    if nr <= nt:
        hp = h * p
        gram = hp @ np.conj(np.swapaxes(h, -1, -2))
    else:
        hs = h * np.sqrt(p)
        gram = np.conj(np.swapaxes(hs, -1, -2)) @ hs
    mi = np.maximum(_logdet_eye_plus(gram), 0.0)
    return float(mi) if mi.ndim == 0 else mi


def mutual_information_dual(H, powers):
    """The transmit-side form ln det(I_nt + diag(powers) H^H H), via slogdet."""
    h = H.entries if isinstance(H, ChannelRealization) else np.asarray(H)
    nt = h.shape[-1]
    p = as_powers(nt, powers)
    a = np.eye(nt) + p[:, None] * (np.conj(np.swapaxes(h, -1, -2)) @ h)
    _, logdet = np.linalg.slogdet(a)
    return float(logdet) if np.ndim(logdet) == 0 else logdet


def layered_mutual_information(H, plan, i):
    """Rate supported for layer ``i`` (1-based) with layers above it as noise.

    MISO only; each layer spreads its power equally over the antennas.
    """
    h = H.entries if isinstance(H, ChannelRealization) else np.asarray(H)
    if h.shape[-2] != 1:
        raise ValueError("layered mutual information is defined for nr = 1")
    powers = np.asarray(plan.powers, dtype=float)
    K = len(powers)
    if not 1 <= i <= K:
        raise IndexError(f"layer index {i} outside 1..{K}")
    nt = h.shape[-1]
    gain = (np.abs(h[..., 0, :]) ** 2).sum(axis=-1) / nt
    interference = powers[i:].sum()
    out = np.log1p(powers[i - 1] * gain / (1.0 + interference * gain))
    return float(out) if np.ndim(out) == 0 else out


def mi_samples(nt, nr, powers, cfg):
    """Per-draw mutual information for the whole sample set."""
    p = as_powers(nt, powers)

    def draw(rng, count):
        return mutual_information(sample_channels(nt, nr, count, rng), p)

    return mc_map(draw, cfg)


def mc_outage(nt, nr, powers, R, cfg):
    """Fraction of draws whose mutual information falls below ``R``."""
    if R < 0:
        raise ValueError("rate must be non-negative")
    mi = mi_samples(nt, nr, powers, cfg)
    return estimate((mi < R).astype(float), cfg)


def mc_ergodic(nt, nr, powers, cfg):
    return estimate(mi_samples(nt, nr, powers, cfg), cfg)


def mc_mi_moments(nt, nr, P, cfg):
    """Sample mean and unbiased variance of the mutual information at P/nt per antenna."""
    mi = mi_samples(nt, nr, P, cfg)
    return float(mi.mean()), float(mi.var(ddof=1)) if mi.size > 1 else 0.0


def mc_expected_rate(nt, plan, cfg):
    """Monte Carlo expected rate of a MISO layer plan.

    Layer ``i`` contributes its rate on a draw iff its layered mutual
    information reaches that rate, which is the per-layer success event of
    the expected-rate objective.
    """
    powers = np.asarray(plan.powers, dtype=float)
    rates = np.asarray(plan.rates, dtype=float)
    interference = np.concatenate([np.cumsum(powers[::-1])[::-1][1:], [0.0]])

    def draw(rng, count):
        h = sample_channels(nt, 1, count, rng)
        gain = (np.abs(h[:, 0, :]) ** 2).sum(axis=-1) / nt
        total = np.zeros(count)
        for Pi, Ii, Ri in zip(powers, interference, rates):
            if Ri <= 0:
                continue
            layer_mi = np.log1p(Pi * gain / (1.0 + Ii * gain))
            total += np.where(layer_mi >= Ri, Ri, 0.0)
        return total

    return estimate(mc_map(draw, cfg), cfg)


def empirical_throughput(mi, cfg=None):
    """Maximize R * Pr{I >= R} over R for an empirical sample of I.

    The empirical objective is piecewise linear in R and peaks at a sample
    value, so scanning the sorted samples is an exact sweep of the outage
    estimator over every rate. Returns ``(rate, McEstimate)``; the standard
    error is the binomial one at the chosen rate.
    """
    x = np.sort(np.asarray(mi, dtype=float))[::-1]
    n = x.size
    # success count for threshold x[j] is j+1 (ties counted by the last copy)
    counts = np.arange(1, n + 1, dtype=float)
    objective = x * counts / n
    j = int(np.argmax(objective))
    rate = float(x[j])
    q = counts[j] / n
    stderr = rate * math.sqrt(q * (1 - q) / (n - 1)) if n > 1 else 0.0
    seed = cfg.seed if cfg is not None else 0
    return rate, McEstimate(float(objective[j]), stderr, n, seed)


def mc_throughput(nt, nr, P, cfg):
    """Monte Carlo maximum throughput at equal power P/nt per antenna."""
    return empirical_throughput(mi_samples(nt, nr, P, cfg), cfg)
