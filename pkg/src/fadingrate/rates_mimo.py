"""MIMO throughput in the low-SNR, high-SNR, large-nt and large-nr regimes.

Outside the low-SNR regime the mutual information at equal power is
modelled as Gaussian, and the maximum throughput becomes a scalar search
over the normalized rate z = (R - mu) / sigma.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import specfun
from .channel import empirical_throughput, mc_map, sample_channels, estimate
from .optimize import maximize_scalar
from .rates_miso import cl_expected_rate, maximize_k_layers, maximize_single_layer

Z_BRACKET = (-10.0, 10.0)

# validity policy for the asymptotic formulas, reported in result metadata
LOW_SNR_MAX_P = 0.1
HIGH_SNR_MIN_P = 100.0
ANTENNA_RATIO = 8


@dataclass(frozen=True)
class GaussianApprox:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise specfun.DomainError("Gaussian model needs sigma > 0")


@dataclass(frozen=True)
class WishartShape:
    p: int
    n: int

    def __post_init__(self):
        if not 1 <= self.p <= self.n:
            raise ValueError(f"need 1 <= p <= n, got p={self.p}, n={self.n}")

    @classmethod
    def from_antennas(cls, nt, nr):
        return cls(min(nt, nr), max(nt, nr))


def gaussian_stationarity(g, z):
    """Derivative of Q(z)(sigma z + mu) in z."""
    pdf = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return -pdf * (g.sigma * z + g.mu) + g.sigma * specfun.q_function(z)


def gaussian_objective(g):
    return lambda z: specfun.q_function(z) * (g.sigma * z + g.mu)


def gaussian_throughput(g, bracket=Z_BRACKET):
    """Maximize Q(z)(sigma z + mu) over z; ``argmax`` is z^o."""
    if g.mu <= 0:
        raise specfun.DomainError("Gaussian throughput needs mu > 0")
    res = maximize_scalar(gaussian_objective(g), bracket, tol=1e-10,
                          grad=lambda z: gaussian_stationarity(g, z))
    res.info["stationarity"] = gaussian_stationarity(g, res.argmax)
    res.info["rate"] = g.sigma * res.argmax + g.mu
    res.info["mu"], res.info["sigma"] = g.mu, g.sigma
    return res


# -- low SNR ---------------------------------------------------------------

def lowsnr_throughput(nt, nr, P):
    """Throughput with I ~ ln(1 + (P/nt) sum |h_lk|^2); argmax s in (0, nr)."""
    res = maximize_single_layer(nt * nr, nt, P, s_max=float(nr))
    res.info["valid"] = P <= LOW_SNR_MAX_P
    return res


def lowsnr_expected_rate_k(nt, nr, P, K, restarts=20, seed=0):
    return maximize_k_layers(nt * nr, nt, P, K, s_max=float(nr), restarts=restarts,
                             seed=seed)


def lowsnr_cl_expected_rate(nt, nr, P):
    return cl_expected_rate(nt * nr, P / nt)


# -- high SNR --------------------------------------------------------------

def wishart_logdet_moments(shape):
    """Mean and variance of ln det W for a central complex Wishart matrix."""
    mean = sum(specfun.digamma_int(shape.n - k) for k in range(shape.p))
    var = sum(specfun.digamma_prime_int(shape.n - k) for k in range(shape.p))
    return mean, var


def bartlett_logdet_sample(shape, rng, size=None):
    """ln det W = sum_l ln a_ll^2 with a_ll^2 ~ Gamma(n - l + 1).

    Integer-shape gamma variates are sums of unit exponentials.
    """
    count = 1 if size is None else size
    total = np.zeros(count)
    for ell in range(1, shape.p + 1):
        k = shape.n - ell + 1
        total += np.log(rng.standard_exponential((count, k)).sum(axis=1))
    return float(total[0]) if size is None else total


def bartlett_logdet_samples(shape, cfg):
    return mc_map(lambda rng, count: bartlett_logdet_sample(shape, rng, count), cfg)


def hisnr_gaussian(nt, nr, P):
    shape = WishartShape.from_antennas(nt, nr)
    mean, var = wishart_logdet_moments(shape)
    return GaussianApprox(mean + shape.p * math.log(P / nt), math.sqrt(var))


def hisnr_throughput(nt, nr, P):
    g = hisnr_gaussian(nt, nr, P)
    if g.mu <= 0:
        return _invalid(g)
    res = gaussian_throughput(g)
    res.info["valid"] = P >= HIGH_SNR_MIN_P
    return res


def _invalid(g):
    from .optimize import OptResult
    return OptResult(float("nan"), 0.0, 0, float("nan"),
                     {"valid": False, "mu": g.mu, "sigma": g.sigma,
                      "warning": "mean log-det is not positive; P too small"})


def hisnr_throughput_mc(nt, nr, P, cfg):
    """Throughput max_s Pr{det W >= nt^p s / P^(p-1)} ln(1 + P s) by Bartlett MC.

    Returns ``(s_opt, McEstimate)``.
    """
    shape = WishartShape.from_antennas(nt, nr)
    logdet = bartlett_logdet_samples(shape, cfg)
    # success iff logdet >= ln(nt^p s / P^(p-1)); each sample is a candidate threshold
    log_s = logdet + (shape.p - 1) * math.log(P) - shape.p * math.log(nt)
    rates = np.log1p(P * np.exp(log_s))
    # ordering by log_s equals ordering by rate
    order = np.argsort(log_s)[::-1]
    _, est = empirical_throughput(rates[order], cfg)
    j = int(np.argmax(rates[order] * np.arange(1, logdet.size + 1)))
    return float(np.exp(log_s[order][j])), est


# -- large arrays ----------------------------------------------------------

def large_nt_gaussian(nt, nr, P):
    return GaussianApprox(nr * math.log1p(P), math.sqrt(nr * P * P / (nt * (1.0 + P * P))))


def large_nr_gaussian(nt, nr, P):
    return GaussianApprox(nt * math.log1p(nr * P / nt), math.sqrt(nt / nr))


def large_nt_throughput(nt, nr, P):
    res = gaussian_throughput(large_nt_gaussian(nt, nr, P))
    res.info["valid"] = nt >= ANTENNA_RATIO * nr
    return res


def large_nr_throughput(nt, nr, P):
    res = gaussian_throughput(large_nr_gaussian(nt, nr, P))
    res.info["valid"] = nr >= ANTENNA_RATIO * nt
    return res


# -- general MIMO surface --------------------------------------------------

@dataclass(frozen=True)
class SurfaceCell:
    nt: int
    nr: int
    P: float
    value: float
    stderr: float
    rate: float
    ergodic: float
    ergodic_stderr: float
    seed: int


def gram_eigenvalues(nt, nr, cfg):
    """Eigenvalues of the smaller Gram matrix of H, one row per draw."""
    def draw(rng, count):
        h = sample_channels(nt, nr, count, rng)
        hh = np.conj(np.swapaxes(h, -1, -2))
        gram = h @ hh if nr <= nt else hh @ h
        return np.clip(np.linalg.eigvalsh(gram), 0.0, None)

    return mc_map(draw, cfg)


def mimo_throughput_surface(nt_values, nr, P_values, cfg):
    """Monte Carlo maximum throughput over a grid of (nt, P) at fixed nr.

    Each nt row reuses one set of channel draws for every P, so the rows are
    pathwise monotone in P.
    """
    cells = []
    for nt in nt_values:
        eig = gram_eigenvalues(nt, nr, cfg)
        for P in P_values:
            mi = np.log1p(eig * (P / nt)).sum(axis=1)
            rate, est = empirical_throughput(mi, cfg)
            erg = estimate(mi, cfg)
            cells.append(SurfaceCell(nt, nr, float(P), est.mean, est.stderr, rate,
                                     erg.mean, erg.stderr, cfg.seed))
    return cells
