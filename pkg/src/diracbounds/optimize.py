"""Derivative-free minimisation of the beta-family bound."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .bounds import ellipsoid_beta_bound
from .quadrature import DEFAULT_TOL

_INVPHI = (math.sqrt(5) - 1) / 2
MAX_ITERATIONS = 200
DEFAULT_STARTS = (0.6, 1.2, 5.0)


@dataclass(frozen=True)
class OptimizationResult:
    beta_star: float
    value: float
    iterations: int
    bracket: tuple[float, float]
    converged: bool = True
    at_boundary: bool = False
    multimodal: bool = False


def minimize_scalar(objective: Callable[[float], float], lo: float, hi: float,
                    tol: float = 1e-8, max_iterations: int = MAX_ITERATIONS) -> OptimizationResult:
    """Golden-section search on ``[lo, hi]``.

    The bracket ends are evaluated too; if an end beats the interior
    minimum the end is returned with ``at_boundary`` set (monotone
    objectives pin there).
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"degenerate bracket [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError("tol must be positive")

    def fval(x):
        y = float(objective(x))
        if not math.isfinite(y):
            raise ValueError(f"objective is not finite at {x!r}: {y!r}")
        return y

    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fval(c), fval(d)
    it = 0
    while b - a > tol and it < max_iterations:
        it += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fval(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fval(d)
    x, fx = (c, fc) if fc <= fd else (d, fd)
    converged = b - a <= tol
    f_lo, f_hi = fval(lo), fval(hi)
    at_boundary = False
    if f_lo < fx:
        x, fx, at_boundary = lo, f_lo, True
    if f_hi < fx:
        x, fx, at_boundary = hi, f_hi, True
    return OptimizationResult(x, fx, it, (lo, hi), converged, at_boundary)


def optimize_beta(a: float, lo: float = 0.51, hi: float = 20.0, tol: float = 1e-6,
                  quad_tol: float = DEFAULT_TOL,
                  starts: tuple[float, ...] = DEFAULT_STARTS) -> OptimizationResult:
    """Minimise ``beta -> ellipsoid_beta_bound(a, beta)`` over ``[lo, hi]``.

    Unimodality is not known for finite ``a``, so the bracket is cut at the
    midpoints between the start points and each piece is searched.  The
    best piece wins; ``multimodal`` flags interior minima in more than one
    piece that disagree in both location and value.
    """
    if not 0.5 < lo < hi:
        raise ValueError("need 1/2 < lo < hi")
    cache: dict[float, float] = {}

    def objective(beta):
        if beta not in cache:
            cache[beta] = ellipsoid_beta_bound(a, beta, quad_tol).value
        return cache[beta]

    inside = sorted(s for s in starts if lo < s < hi)
    cuts = [lo] + [0.5 * (p + q) for p, q in zip(inside, inside[1:])] + [hi]
    results = [minimize_scalar(objective, p, q, tol) for p, q in zip(cuts, cuts[1:])]
    best = min(results, key=lambda r: r.value)
    interior = [r for r in results if not r.at_boundary]
    spread_beta = max(r.beta_star for r in interior) - min(r.beta_star for r in interior) if interior else 0.0
    spread_value = max(r.value for r in interior) - min(r.value for r in interior) if interior else 0.0
    # a flat objective has many minimisers but no real disagreement
    multimodal = spread_beta > 10 * tol and spread_value > 1e-9 * max(1.0, abs(best.value))
    at_boundary = best.beta_star in (lo, hi)
    return OptimizationResult(
        best.beta_star, objective(best.beta_star),
        sum(r.iterations for r in results), (lo, hi),
        all(r.converged for r in results), at_boundary, multimodal,
    )
