"""Special functions for integer shapes and real arguments.

Everything here is scalar, pure and reentrant. Shape parameters are
positive integers, so the incomplete gamma function and digamma reduce to
finite sums.
"""

import math

# Euler-Mascheroni constant, 20 significant digits.
EULER_GAMMA = 0.57721566490153286061

_INV_E = math.exp(-1.0)
_EPS = 2.220446049250313e-16


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def _check_shape(n):
    if int(n) != n or n < 1:
        raise DomainError(f"shape must be a positive integer, got {n!r}")
    return int(n)


def _check_finite(x, name="x"):
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


def _exp_partial_sum(n, x):
    # sum_{l=0}^{n-1} x^l / l!, ascending
    term = 1.0
    total = 1.0
    for ell in range(1, n):
        term *= x / ell
        total += term
    return total


def upper_incomplete_gamma(n, x):
    """Gamma(n, x) = (n-1)! e^{-x} sum_{l<n} x^l / l! for integer n >= 1."""
    n = _check_shape(n)
    _check_finite(x)
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x!r}")
    return math.factorial(n - 1) * math.exp(-x) * _exp_partial_sum(n, x)


def regularized_gamma_q(n, x):
    """Upper regularized incomplete gamma Gamma(n, x) / (n-1)!.

    This is the tail probability Pr{a >= x} of a sum of ``n`` independent
    unit exponentials.
    """
    n = _check_shape(n)
    _check_finite(x)
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x!r}")
    return math.exp(-x) * _exp_partial_sum(n, x)


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < 1e-17 * abs(total) or k > 200:
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - total


def _e1_scaled_cf(x):
    # e^x E1(x) by modified Lentz on the continued fraction
    # 1/(x+1-) 1/(x+3-) 4/(x+5-) ...
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x!r}")


def exp_e1_scaled(x):
    """e^x E1(x); finite for large x where E1 itself underflows."""
    _check_finite(x)
    if x <= 0:
        raise DomainError(f"E1 needs x > 0, got {x!r}")
    if x < 1.0:
        return math.exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


def exp_integral_e1(x):
    """Exponential integral E1(x) for x > 0.

    Power series below 1, continued fraction at and above 1.
    """
    _check_finite(x)
    if x <= 0:
        raise DomainError(f"E1 needs x > 0, got {x!r}")
    if x < 1.0:
        return _e1_series(x)
    return math.exp(-x) * _e1_scaled_cf(x)


def lambert_w0(x, max_iter=50):
    """Principal branch W0 of the Lambert W function (W e^W = x, W >= -1)."""
    _check_finite(x)
    branch_pt = -_INV_E
    if x < branch_pt:
        if x > branch_pt - 1e-15:
            x = branch_pt
        else:
            raise DomainError(f"W0 needs x >= -1/e, got {x!r}")
    if x == 0.0:
        return 0.0
    if x == branch_pt:
        return -1.0
    if x >= -0.25:
        w = math.log1p(x)
        if x > 3.0:
            lx = math.log(x)
            w = lx - math.log(lx)
    else:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0 or abs(f) <= 4 * _EPS * abs(x):
            return w
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w_new = w - step
        if abs(step) <= 4e-16 * (1.0 + abs(w_new)):
            return w_new
        w = w_new
    raise ArithmeticError(f"Halley iteration for W0({x!r}) did not converge")


def q_function(z):
    """Gaussian tail probability Q(z) = Pr{N(0,1) >= z}."""
    if math.isnan(z):
        raise DomainError("Q(z) undefined for NaN")
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def digamma_int(m):
    """psi(m) = -gamma + sum_{l=1}^{m-1} 1/l for integer m >= 1."""
    m = _check_shape(m)
    total = -EULER_GAMMA
    for ell in range(1, m):
        total += 1.0 / ell
    return total


def digamma_prime_int(m):
    """Trigamma at a positive integer: pi^2/6 - sum_{l=1}^{m-1} 1/l^2."""
    m = _check_shape(m)
    partial = 0.0
    for ell in range(1, m):
        partial += 1.0 / (ell * ell)
    return math.pi ** 2 / 6.0 - partial
