"""Numerical integration engine.

Every integral in the package goes through one of three entry points:

* :func:`integrate_adaptive` -- globally adaptive Gauss-Kronrod (7/15) on a
  finite interval, bisecting the interval with the largest error estimate.
* :func:`integrate_periodic` -- equal-spaced trapezoid rule for smooth
  periodic integrands, optionally doubling ``n`` until two successive values
  agree.
* :func:`integrate_semi_infinite` -- ``[lo, oo)`` split at 1 with the tail
  mapped by ``x -> 1/x``.

Integrands are called with 1-d numpy arrays of abscissae and must return an
array of the same shape.  Nodes are strictly interior to each subinterval, so
integrable endpoint singularities never get evaluated.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureError",
    "QuadratureResult",
    "integrate_adaptive",
    "integrate_periodic",
    "integrate_semi_infinite",
]

# Kronrod 15-point abscissae on [-1, 1] (non-negative half, centre last),
# with the embedded 7-point Gauss rule on the odd entries.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-node layout: -x0..-x6, 0, x6..x0
NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:14:2] = _WG[2::-1]

_EPS = np.finfo(float).eps
DEFAULT_TOL = 1e-10
DEFAULT_MAX_DEPTH = 60


class QuadratureError(RuntimeError):
    """Adaptive integration could not reach the requested tolerance.

    ``worst_interval`` is the subinterval carrying the largest error estimate
    when the search gave up.
    """

    def __init__(self, message, value, error, worst_interval):
        super().__init__(message)
        self.value = value
        self.error = error
        self.worst_interval = worst_interval


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    pieces: tuple = ()

    def __float__(self):
        return float(self.value)


def _gk15(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre + half * NODES
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise ValueError(f"integrand is not finite at x={bad!r}")
    kronrod = half * np.dot(KRONROD_WEIGHTS, fx)
    gauss = half * np.dot(GAUSS_WEIGHTS, fx)
    # QUADPACK-style error scaling
    mean = kronrod / (2.0 * half) if half else 0.0
    resasc = abs(half) * np.dot(KRONROD_WEIGHTS, np.abs(fx - mean))
    resabs = abs(half) * np.dot(KRONROD_WEIGHTS, np.abs(fx))
    err = abs(kronrod - gauss)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return kronrod, err, resabs


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL,
    *,
    rtol: float = 0.0,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_evaluations: int = 2_000_000,
) -> QuadratureResult:
    """Integrate ``f`` over ``[lo, hi]`` to absolute accuracy ``tol``.

    The run stops once the summed error estimate is below
    ``max(tol, rtol * |value|)`` or below the round-off floor
    ``100 * eps * integral(|f|)``.  Subintervals that reach ``max_depth``
    bisections are frozen; if the frozen ones alone exceed the target, a
    :class:`QuadratureError` is raised.
    """
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError("tol must be positive")

    value, err, resabs = _gk15(f, lo, hi)
    evaluations = 15
    # heap entries: (-err, lo, hi, value, depth, resabs)
    heap = [(-err, lo, hi, value, 0, resabs)]
    frozen = []
    frozen_err = 0.0
    total_value = value
    total_err = err
    total_abs = resabs

    while True:
        target = max(tol, rtol * abs(total_value), 100 * _EPS * total_abs)
        if total_err <= target:
            break
        if not heap or frozen_err > target:
            worst = max(frozen, key=lambda item: -item[0])
            raise QuadratureError(
                f"max depth {max_depth} reached; error {total_err:.3e} > {target:.3e}",
                total_value, total_err, (worst[1], worst[2]),
            )
        if evaluations >= max_evaluations:
            worst = heap[0]
            raise QuadratureError(
                f"evaluation budget {max_evaluations} exhausted; error {total_err:.3e}",
                total_value, total_err, (worst[1], worst[2]),
            )
        neg_err, a, b, v, depth, rabs = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        # not (a < mid < b): no longer splittable in floating point
        if depth >= max_depth or not (a < mid < b):
            frozen.append((neg_err, a, b, v, depth, rabs))
            frozen_err -= neg_err
            continue
        v1, e1, r1 = _gk15(f, a, mid)
        v2, e2, r2 = _gk15(f, mid, b)
        evaluations += 30
        total_value += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        total_abs += r1 + r2 - rabs
        heapq.heappush(heap, (-e1, a, mid, v1, depth + 1, r1))
        heapq.heappush(heap, (-e2, mid, b, v2, depth + 1, r2))

    # re-sum to shed accumulated drift from the running totals
    items = heap + frozen
    value = math.fsum(item[3] for item in items)
    error = math.fsum(-item[0] for item in items)
    return QuadratureResult(value, error, evaluations)


def integrate_periodic(
    f: Callable[[np.ndarray], np.ndarray],
    period: float,
    n: int = 64,
    *,
    tol: float | None = None,
    max_n: int = 1 << 16,
    start: float = 0.0,
) -> float:
    """Trapezoid rule with ``n`` equal steps over one period.

    With ``tol`` set, ``n`` is doubled until two successive values differ by
    at most ``tol``.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    if n < 8:
        raise ValueError("n must be at least 8")

    def rule(m):
        x = start + period * np.arange(m) / m
        fx = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(fx)):
            raise ValueError("integrand is not finite on the periodic grid")
        return period * math.fsum(np.broadcast_to(fx, x.shape)) / m

    value = rule(n)
    if tol is None:
        return value
    while True:
        n *= 2
        if n > max_n:
            raise QuadratureError(
                f"periodic rule did not settle below {tol:.1e} by n={max_n}",
                value, float("nan"), (start, start + period),
            )
        new = rule(n)
        if abs(new - value) <= tol:
            return new
        value = new


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float = 0.0,
    tol: float = DEFAULT_TOL,
    **kwargs,
) -> QuadratureResult:
    """Integrate ``f`` over ``[lo, oo)``.

    ``[lo, 1]`` is integrated directly and ``[max(lo, 1), oo)`` through
    ``u = 1/x``, i.e. ``f(1/u) / u**2`` on ``(0, 1/max(lo, 1)]``.  The result
    is the plain sum of the two pieces, both kept in ``pieces``.
    """

    def tail(u):
        return f(1.0 / u) / (u * u)

    if lo >= 1.0:
        res = integrate_adaptive(tail, 0.0, 1.0 / lo, tol, **kwargs)
        return QuadratureResult(res.value, res.error_estimate, res.evaluations, (res,))
    head = integrate_adaptive(f, lo, 1.0, 0.5 * tol, **kwargs)
    rest = integrate_adaptive(tail, 0.0, 1.0, 0.5 * tol, **kwargs)
    return QuadratureResult(
        head.value + rest.value,
        head.error_estimate + rest.error_estimate,
        head.evaluations + rest.evaluations,
        (head, rest),
    )
