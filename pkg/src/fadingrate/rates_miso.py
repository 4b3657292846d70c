"""MISO/SISO/SIMO rates under Rayleigh block fading, all in nats.

The channel gain a = sum |h_l|^2 of an nt x 1 MISO link is Gamma(nt, 1)
distributed. With equal power P/nt per antenna every quantity below is a
functional of that law, which is why the functions take a gamma ``shape``
and a threshold ``scale`` internally: the low-SNR MIMO results reuse the
same code with shape nt * nr.
"""

from dataclasses import dataclass
import math

from . import specfun
from .optimize import find_root, maximize_layered, maximize_scalar, BracketError


@dataclass(frozen=True)
class LayerPlan:
    """K superposed layers; layer 1 is decoded first.

    Layer i sees the power of all layers above it as interference,
    I_i = sum_{j>i} P_j, and uses rate ln(1 + P_i s_i / (1 + I_i s_i)).
    """

    powers: tuple
    thresholds: tuple
    s_max: float = 1.0

    def __post_init__(self):
        p = tuple(float(x) for x in self.powers)
        s = tuple(float(x) for x in self.thresholds)
        if len(p) != len(s) or not p:
            raise ValueError("powers and thresholds must be non-empty and equal length")
        if any(x < 0 for x in p):
            raise ValueError("layer powers must be non-negative")
        if any(not 0 < x <= self.s_max for x in s):
            raise ValueError(f"thresholds must lie in (0, {self.s_max}]")
        object.__setattr__(self, "powers", p)
        object.__setattr__(self, "thresholds", s)

    @property
    def K(self):
        return len(self.powers)

    @property
    def total_power(self):
        return math.fsum(self.powers)

    @property
    def interference(self):
        return tuple(math.fsum(self.powers[i + 1:]) for i in range(self.K))

    @property
    def rates(self):
        return tuple(math.log1p(p * s / (1.0 + i * s))
                     for p, s, i in zip(self.powers, self.thresholds, self.interference))


@dataclass(frozen=True)
class ClBoundaries:
    s0: float
    s1: float


# -- proof machinery -------------------------------------------------------

def r_func(nt, s):
    """Tail-to-density ratio Pr{a >= nt s} / (nt f_a(nt s)) as a finite sum."""
    if s <= 0:
        raise specfun.DomainError("r(s) diverges at s <= 0")
    total = 1.0
    for ell in range(nt - 1):
        prod = 1.0
        for k in range(nt - ell - 1):
            prod *= (nt - k - 1) / (nt * s)
        total += prod
    return total / nt


def g_func(s, P):
    """((1 + P s) / P) ln(1 + P s)."""
    if P <= 0:
        raise specfun.DomainError("g(s, P) needs P > 0")
    return (1.0 + P * s) / P * math.log1p(P * s)


# -- single layer ----------------------------------------------------------

def _tail(shape, x):
    return specfun.regularized_gamma_q(shape, x)


def _density(shape, x):
    if x == 0:
        return 1.0 if shape == 1 else 0.0
    return math.exp((shape - 1) * math.log(x) - x - math.lgamma(shape))


def single_layer_objective(shape, scale, P):
    """s -> Pr{a >= scale s} ln(1 + P s) with a ~ Gamma(shape)."""
    return lambda s: _tail(shape, scale * s) * math.log1p(P * s)


def _single_layer_grad(shape, scale, P):
    def grad(s):
        x = scale * s
        return (_tail(shape, x) * P / (1.0 + P * s)
                - scale * _density(shape, x) * math.log1p(P * s))
    return grad


def maximize_single_layer(shape, scale, P, s_max=1.0, tol=1e-10):
    if P <= 0:
        raise specfun.DomainError("power must be positive")
    f = single_layer_objective(shape, scale, P)
    res = maximize_scalar(f, (0.0, s_max), tol=tol,
                          grad=_single_layer_grad(shape, scale, P))
    res.info["rate"] = math.log1p(P * res.argmax)
    return res


def throughput_objective(nt, P, s):
    return single_layer_objective(nt, nt, P)(s)


def miso_throughput_max(nt, P):
    """Maximum throughput of an nt x 1 link with equal power on all antennas.

    ``argmax`` is the normalized threshold s^o; the transmission rate is
    ln(1 + P s^o), also reported in ``info["rate"]``.
    """
    return maximize_single_layer(nt, nt, P)


def siso_throughput_closed(P):
    """Lambert-W closed form (s^o, max throughput) for a single antenna."""
    if P <= 0:
        raise specfun.DomainError("power must be positive")
    w = specfun.lambert_w0(P)
    s = 1.0 / w - 1.0 / P
    value = math.exp(1.0 / P - 1.0 / w) * math.log(P / w)
    return s, value


# -- ergodic capacity ------------------------------------------------------

def miso_ergodic(nt, P):
    """Ergodic capacity of the nt x 1 channel as a finite double sum.

    The alternating sums cancel strongly when nt / P is large; accuracy is
    about 1e-12 absolute for nt <= 4 at P >= 0.1.
    """
    if P <= 0:
        raise specfun.DomainError("power must be positive")
    x = nt / P
    lead = math.fsum((-x) ** ell / math.factorial(ell) for ell in range(nt))
    terms = [specfun.exp_e1_scaled(x) * lead]
    for ell in range(1, nt):
        for k in range(ell):
            coef = (-1) ** k / ((ell - k) * math.factorial(k))
            inner = math.fsum(x ** (k + m) / math.factorial(m) for m in range(ell - k))
            terms.append(coef * inner)
    return math.fsum(terms)


def simo_ergodic(nr, P):
    """1 x nr SIMO ergodic capacity, the nr x 1 MISO value at power nr P."""
    return miso_ergodic(nr, nr * P)


def ergodic_integrand(shape, power_per_gain):
    """Density-weighted ln(1 + c a) for quadrature of the ergodic capacity."""
    def f(a):
        if a <= 0:
            return 0.0
        return _density(shape, a) * math.log1p(power_per_gain * a)
    return f


# -- K layers --------------------------------------------------------------

def layered_objective(shape, scale):
    """Expected-rate objective for threshold and power vectors."""
    def f(s, p):
        total = 0.0
        above = 0.0
        for si, pi in zip(reversed(list(s)), reversed(list(p))):
            if pi > 0:
                total += _tail(shape, scale * si) * math.log1p(pi * si / (1.0 + above * si))
            above += pi
        return total
    return f


def maximize_k_layers(shape, scale, P, K, s_max=1.0, restarts=20, seed=0,
                      extra_starts=()):
    if P <= 0:
        raise specfun.DomainError("power must be positive")
    single = maximize_single_layer(shape, scale, P, s_max=s_max)
    if K == 1:
        plan = LayerPlan((P,), (single.argmax,), s_max=s_max)
        return plan, single.value
    objective = layered_objective(shape, scale)
    res = maximize_layered(K, P, objective, restarts=restarts, s_max=s_max, seed=seed,
                           s_single=single.argmax, extra_starts=extra_starts)
    s, p = res.argmax
    plan = LayerPlan(p, s, s_max=s_max)
    return plan, res.value


def miso_expected_rate_k(nt, P, K, restarts=20, seed=0, extra_starts=()):
    """Maximum K-layer expected rate; returns ``(LayerPlan, value)``."""
    return maximize_k_layers(nt, nt, P, K, restarts=restarts, seed=seed,
                             extra_starts=extra_starts)


# -- continuous layers -----------------------------------------------------

def _boundary_lhs(m, s):
    # sum_{l=0}^{m-1} (m-1)! / (l! s^{m-l}) = sum_{j=1}^{m} (m-1)!/((m-j)! s^j)
    term = 1.0 / s
    total = term
    for j in range(1, m):
        term *= (m - j) / s
        total += term
    return total


def _solve_boundary(g, lo, hi):
    for _ in range(60):
        if g(lo) * g(hi) <= 0:
            return find_root(g, (lo, hi), tol=0.0)
        lo, hi = lo / 10.0, hi * 2.0
    raise BracketError("could not bracket the layering boundary")


def cl_boundaries(shape, power_per_gain):
    """Boundaries of the optimal continuum of layers for a Gamma(shape) gain."""
    if power_per_gain <= 0:
        raise specfun.DomainError("power must be positive")
    m, c = shape, power_per_gain
    s0 = _solve_boundary(lambda s: _boundary_lhs(m, s) - 1.0 - c * s, 1e-8, max(1.0, m))
    s1 = _solve_boundary(lambda s: _boundary_lhs(m, s) - 1.0, 1e-8, 10.0 * m)
    return ClBoundaries(s0, s1)


def cl_boundary_residuals(shape, power_per_gain, b):
    return (_boundary_lhs(shape, b.s0) - 1.0 - power_per_gain * b.s0,
            _boundary_lhs(shape, b.s1) - 1.0)


def solve_cl_boundaries(nt, P):
    return cl_boundaries(nt, P / nt)


def cl_integrand(shape, s):
    """e^{-s} ((m+1)/s - 1) sum_{l<m} s^l/l!, the integrand between the boundaries."""
    return math.exp(-s) * ((shape + 1) / s - 1.0) * specfun._exp_partial_sum(shape, s)


def cl_antiderivative_shape(shape, s):
    if s <= 0:
        raise specfun.DomainError("antiderivative has a pole at s = 0")
    m = shape
    total = 0.0
    head = 1.0       # sum_{k<l} s^k/k!
    power = 1.0      # s^l / l!
    for ell in range(1, m):
        power *= s / ell
        total += power - (m + 1 - ell) / ell * head
        head += power
    return math.exp(-s) * (total + 1.0) - (m + 1) * specfun.exp_integral_e1(s)


def cl_antiderivative(nt, s):
    """Antiderivative of the continuous-layer integrand for an nt x 1 link."""
    return cl_antiderivative_shape(nt, s)


def cl_expected_rate(shape, power_per_gain):
    b = cl_boundaries(shape, power_per_gain)
    return cl_antiderivative_shape(shape, b.s1) - cl_antiderivative_shape(shape, b.s0)


def miso_cl_expected_rate(nt, P):
    """Maximum continuous-layer expected rate of the nt x 1 channel."""
    return cl_expected_rate(nt, P / nt)
