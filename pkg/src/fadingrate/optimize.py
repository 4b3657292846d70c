"""Scalar maximization, bisection and multi-start layered search."""

from dataclasses import dataclass, field
import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
GRID_POINTS = 64


class OptimizationError(ArithmeticError):
    pass


class BracketError(ValueError):
    pass


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")


@dataclass
class OptResult:
    argmax: object
    value: float
    iterations: int
    tol_achieved: float
    info: dict = field(default_factory=dict)


def _bracket(b):
    return b if isinstance(b, Bracket) else Bracket(*b)


def _eval(f, x):
    y = f(x)
    if not math.isfinite(y):
        raise OptimizationError(f"objective is not finite at x={x!r} (got {y!r})")
    return y


def find_root(g, bracket, tol=1e-12, max_iter=400):
    """Bisection for a sign change of ``g`` inside ``bracket``."""
    b = _bracket(bracket)
    lo, hi = b.lo, b.hi
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if glo * ghi > 0:
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: g(lo)={glo!r}, g(hi)={ghi!r}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _golden(f, lo, hi, tol):
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = _eval(f, x1), _eval(f, x2)
    it = 0
    while hi - lo > tol and it < 500:
        it += 1
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = _eval(f, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = _eval(f, x2)
    if f1 >= f2:
        return x1, f1, hi - lo, it
    return x2, f2, hi - lo, it


def maximize_scalar(f, bracket, tol=1e-10, grad=None, grid=GRID_POINTS):
    """Maximize ``f`` on a closed interval.

    A uniform grid scan picks the best cell, then golden-section search
    refines inside the neighbouring cells. The returned value is never below
    the best grid value. If ``grad`` (the derivative, or any function with
    its sign) is given, the golden result is polished by bisecting on the
    sign change of ``grad``, which resolves flat maxima far below the
    square-root-of-epsilon limit of value comparisons.
    """
    b = _bracket(bracket)
    xs = np.linspace(b.lo, b.hi, grid)
    ys = [_eval(f, float(x)) for x in xs]
    j = int(np.argmax(ys))
    best_x, best_y = float(xs[j]), ys[j]
    lo = float(xs[max(j - 1, 0)])
    hi = float(xs[min(j + 1, grid - 1)])
    gx, gy, width, it = _golden(f, lo, hi, tol)
    if gy > best_y:
        best_x, best_y = gx, gy
    info = {"grid_max": max(ys)}
    if grad is not None and lo < best_x < hi:
        try:
            root = find_root(grad, (lo, hi), tol=0.0)
        except BracketError:
            root = None
        if root is not None:
            ry = _eval(f, root)
            if ry >= best_y - 4 * np.finfo(float).eps * abs(best_y):
                best_x, best_y = root, max(ry, best_y)
                info["polished"] = True
    return OptResult(best_x, best_y, it + grid, width, info)


def project_simplex(v, total):
    """Euclidean projection of ``v`` onto {x >= 0, sum x = total}."""
    v = np.asarray(v, dtype=float)
    if total == 0:
        return np.zeros_like(v)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, v.size + 1)
    # index 0 always qualifies; rounding can hide it when total << max(v)
    support = np.nonzero(u - css / idx > 0)[0]
    rho = support[-1] if support.size else 0
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _set_power(p, i, t, total):
    # coordinate i takes t; the rest share total - t in proportion
    rest_sum = math.fsum(x for j, x in enumerate(p) if j != i)
    remaining = max(total - t, 0.0)
    out = np.empty(len(p))
    for j, x in enumerate(p):
        if j == i:
            out[j] = t
        elif rest_sum > 0:
            out[j] = x * (remaining / rest_sum)
        else:
            out[j] = remaining / (len(p) - 1)
    return out


def _coordinate_ascent(objective, s, p, total, s_max, tol, max_sweeps):
    K = len(s)
    value = objective(s, p)
    sweeps = 0
    improvement = math.inf
    while sweeps < max_sweeps:
        sweeps += 1
        start = value
        for i in range(K):
            def fs(x, i=i):
                trial = s.copy()
                trial[i] = x
                return objective(trial, p)

            r = maximize_scalar(fs, (s_max * 1e-9, s_max), tol=tol)
            if r.value > value:
                s[i], value = r.argmax, r.value
            if K > 1:
                def fp(t, i=i):
                    return objective(s, _set_power(p, i, t, total))

                r = maximize_scalar(fp, (0.0, total), tol=tol * max(total, 1.0))
                if r.value > value:
                    p, value = _set_power(p, i, r.argmax, total), r.value
        projected = project_simplex(p, total)
        pv = objective(s, projected)
        if pv >= value:
            p, value = projected, pv
        improvement = value - start
        if improvement <= 1e-13 * max(1.0, abs(value)):
            break
    return s, p, value, sweeps, improvement


def maximize_layered(K, P, objective, restarts=20, tol=1e-8, s_max=1.0,
                     seed=0, s_single=None, extra_starts=(), max_sweeps=60):
    """Multi-start coordinate ascent over K thresholds and a power simplex.

    ``objective(s, p)`` takes threshold and power vectors of equal length
    (any length up to K). Starts: the equal power split with every
    threshold at the single-layer optimum, all power on the lowest layer,
    ``restarts`` random feasible points, and any ``extra_starts`` given as
    ``(s, p)`` pairs. The best local optimum wins; exact ties go to the
    lexicographically smallest argmax.
    """
    if K < 1:
        raise ValueError("need at least one layer")
    if s_single is None:
        s_single = maximize_scalar(lambda x: objective(np.array([x]), np.array([P])),
                                   (0.0, s_max), tol=1e-10).argmax
    starts = [
        (np.full(K, s_single), np.full(K, P / K)),
        (np.full(K, s_single), np.concatenate([[P], np.zeros(K - 1)])),
    ]
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        s0 = np.sort(rng.uniform(0.05, 0.95, K)) * s_max
        p0 = rng.dirichlet(np.ones(K)) * P
        starts.append((s0, p0))
    for s0, p0 in extra_starts:
        starts.append((np.asarray(s0, float).copy(), np.asarray(p0, float).copy()))

    best = None
    total_sweeps = 0
    for s0, p0 in starts:
        if K == 1:
            r = maximize_scalar(lambda x: objective(np.array([x]), np.array([P])),
                                (s_max * 1e-9, s_max), tol=tol)
            s, p, v, n, imp = np.array([r.argmax]), np.array([P]), r.value, 1, r.tol_achieved
        else:
            s, p, v, n, imp = _coordinate_ascent(objective, s0.copy(), p0.copy(), P,
                                                 s_max, tol, max_sweeps)
        total_sweeps += n
        key = (v, [-x for x in np.concatenate([s, p])])
        if best is None or key > best[0]:
            best = (key, s, p, v, imp)
        if K == 1:
            break
    _, s, p, v, imp = best
    return OptResult((tuple(float(x) for x in s), tuple(float(x) for x in p)), float(v),
                     total_sweeps, float(abs(imp)), {"starts": len(starts)})
