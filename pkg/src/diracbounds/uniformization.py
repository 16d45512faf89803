"""Conformal uniformizations of the ellipsoid and of the tube.

Ellipsoid
---------
A rotationally symmetric conformal map from the round sphere, written in
the stereographic coordinate ``x`` as ``(x, phi) -> (w(x), phi)``, must solve

    Delta_a(w)^(1/2) / (1 - w^2) * w'(x) = -1/x,    w(0) = 1, w(oo) = -1.

The equation separates.  With ``t = -ln x`` and ``s = artanh w``,

    t = int_0^w Delta_a^(1/2)(u) / (1 - u^2) du
      = s - (1 - a^2) * int_0^w du / (1 + Delta_a^(1/2)(u)),

where the second line removes the logarithmic blow-up at ``u = 1``.  The
right side is increasing in ``s`` with slope ``Delta_a^(1/2)(tanh s)``,
which lies between ``min(1, a)`` and ``max(1, a)``, so each ``t`` has a
unique, well bracketed root.  ``w(1) = 0`` and ``w(x) = -w(1/x)`` hold by
construction (``t -> -t`` maps to ``s -> -s``).

Working in ``(t, s)`` also keeps the conformal factor free of cancellation:
``h^4 = cosh(t)^2 / cosh(s)^2``.

Tube
----
``phi(psi)`` solves ``r phi' = 1 - r k cos phi`` in closed form; see
:func:`tube_phi`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TubeParam, delta_a
from .quadrature import (
    DEFAULT_TOL,
    QuadratureResult,
    integrate_adaptive,
    integrate_semi_infinite,
)

__all__ = [
    "ProfileSolution",
    "solve_profile",
    "conformal_factor_h4",
    "i1",
    "i1_result",
    "i1_full_line",
    "tube_phi",
    "tube_h2",
    "tube_h2_tangent_form",
]

_EPS = np.finfo(float).eps
_G_TOL = 1e-15


class RootBracketError(RuntimeError):
    pass


def _sech2(s):
    e = np.exp(-2.0 * np.abs(s))
    return 4.0 * e / (1.0 + e) ** 2


@dataclass(frozen=True)
class ProfileSolution:
    """Uniformizing profile ``w_a`` of the ellipsoid ``E(a)``.

    Evaluated on demand by inverting the separable integral; the instance
    itself holds no mutable state.
    """

    a: float
    tol: float = DEFAULT_TOL
    _g1: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        object.__setattr__(self, "_g1", self._g(1.0))

    @property
    def _c(self) -> float:
        return 1.0 - self.a * self.a

    def _g(self, w: float) -> float:
        """``int_0^w du / (1 + Delta_a(u)^(1/2))``, smooth on [0, 1]."""
        if w == 0.0:
            return 0.0
        a = self.a
        res = integrate_adaptive(
            lambda u: 1.0 / (1.0 + np.sqrt(delta_a(a, u))), 0.0, w, _G_TOL
        )
        return res.value

    def t_of_s(self, s: float) -> float:
        """``-ln x`` as a function of ``s = artanh w`` (for ``s >= 0``)."""
        w = math.tanh(s)
        g = self._g1 if w == 1.0 else self._g(w)
        return s - self._c * g

    def t_of_w(self, w: float) -> float:
        """``-ln x`` at which the profile takes the value ``w``."""
        if w < 0:
            return -self.t_of_w(-w)
        return self.t_of_s(math.atanh(w))

    def s_of_t(self, t: float) -> float:
        """Solve ``t_of_s(s) = t``; odd in ``t``."""
        if t < 0:
            return -self.s_of_t(-t)
        if t == 0:
            return 0.0
        a = self.a
        lo, hi = t / max(1.0, a), t / min(1.0, a)
        if self._c == 0.0:
            return t
        # safeguarded Newton; derivative of t_of_s is Delta_a(tanh s)^(1/2)
        s = min(max(t, lo), hi)
        # t_of_s is only known to round-off plus |c| times the g tolerance
        floor = 16 * _EPS * (t + abs(self._c) * self._g1) + 2 * abs(self._c) * _G_TOL
        for _ in range(100):
            resid = self.t_of_s(s) - t
            if abs(resid) <= floor:
                return s
            if resid > 0:
                hi = s
            else:
                lo = s
            slope = math.sqrt(delta_a(a, math.tanh(s)))
            step = resid / slope
            s_new = s - step
            if not lo <= s_new <= hi:
                s_new = 0.5 * (lo + hi)
            if abs(s_new - s) <= 4 * _EPS * max(1.0, s) or hi - lo <= 4 * _EPS * max(1.0, s):
                return s_new
            s = s_new
        raise RootBracketError(f"profile inversion did not converge for t={t}")

    def _s_of_x(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError("x must be positive")
        t = -np.log(x)
        return np.vectorize(self.s_of_t, otypes=[float])(t)

    def w(self, x):
        """Profile value ``w_a(x)``; vectorised over ``x > 0``."""
        return np.tanh(self._s_of_x(x))

    __call__ = w

    def one_minus_w2(self, x):
        """``1 - w_a(x)^2`` computed without cancellation."""
        return _sech2(self._s_of_x(x))

    def derivative(self, x):
        """``w_a'(x)`` from the differential equation itself."""
        x = np.asarray(x, dtype=float)
        s = self._s_of_x(x)
        w = np.tanh(s)
        return -_sech2(s) / (x * np.sqrt(delta_a(self.a, w)))

    def i1_integrand_t(self, t):
        """``(tanh t - w/Delta^(1/2))^2`` at ``x = exp(-t)``, for ``t >= 0``.

        Written as ``(1 - tanh t) - (1 - w/Delta^(1/2))`` with both brackets
        evaluated directly, so it stays accurate as both tend to zero.
        """
        t = np.asarray(t, dtype=float)
        s = np.vectorize(self.s_of_t, otypes=[float])(t)
        w = np.tanh(s)
        sech2 = _sech2(s)
        root = np.sqrt(delta_a(self.a, w))
        one_minus_ratio = self.a ** 2 * sech2 / (root * (root + w))
        e = np.exp(-2.0 * t)
        one_minus_tanh = 2.0 * e / (1.0 + e)
        return (one_minus_tanh - one_minus_ratio) ** 2


def solve_profile(a: float, tol: float = DEFAULT_TOL) -> ProfileSolution:
    return ProfileSolution(float(a), tol)


def conformal_factor_h4(sol: ProfileSolution, x):
    """``h_a^4(x) = (1 - w_a^2) (1 + x^2)^2 / (4 x^2)``.

    Evaluated as ``cosh(t)^2 / cosh(s)^2`` with ``t = -ln x``.
    """
    x = np.asarray(x, dtype=float)
    s = sol._s_of_x(x)
    t = -np.log(x)
    # ratio of cosh written to avoid overflow for large |t|, |s|
    ts, ss = np.abs(t), np.abs(s)
    log_ratio = (ts - ss) + np.log1p(np.exp(-2 * ts)) - np.log1p(np.exp(-2 * ss))
    return np.exp(2 * log_ratio)


def i1_result(a: float, tol: float = DEFAULT_TOL, profile: ProfileSolution | None = None) -> QuadratureResult:
    """``I_1(a) = pi int_0^1 (1/x) (w/Delta^(1/2) + (x^2-1)/(x^2+1))^2 dx``.

    Integrated in ``t = -ln x`` over ``[0, oo)`` (same integral, since
    ``dx/x = -dt``), which keeps the long logarithmic range of prolate
    ellipsoids finite for the adaptive rule.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    sol = profile if profile is not None else solve_profile(a, tol)
    if a == 1.0:
        return QuadratureResult(0.0, 0.0, 0)
    res = integrate_semi_infinite(sol.i1_integrand_t, 0.0, tol / math.pi)
    return QuadratureResult(math.pi * res.value, math.pi * res.error_estimate,
                            res.evaluations, res.pieces)


def i1(a: float, tol: float = DEFAULT_TOL, profile: ProfileSolution | None = None) -> float:
    return i1_result(a, tol, profile).value


def i1_full_line(a: float, tol: float = DEFAULT_TOL) -> float:
    """``(pi/2) int_0^oo (1/x)(...)^2 dx`` over the whole chart, without symmetry.

    Only used to check the reduction to ``[0, 1]``.
    """
    sol = solve_profile(a, tol)

    def integrand_x(x):
        w = sol.w(x)
        ratio = w / np.sqrt(delta_a(a, w))
        return (ratio + (x * x - 1) / (x * x + 1)) ** 2 / x

    return 0.5 * math.pi * integrate_semi_infinite(integrand_x, 0.0, tol).value


def _tube_theta(t: TubeParam, psi):
    return math.sqrt(1 - t.rk ** 2) * np.asarray(psi, dtype=float) / (2 * t.r)


def _check_psi(t: TubeParam, psi):
    psi = np.asarray(psi, dtype=float)
    period = t.period
    if np.any(psi < 0) or np.any(psi > period * (1 + 4 * _EPS)):
        raise ValueError(f"psi must lie in [0, A] with A = {period}")
    return psi


def tube_phi(t: TubeParam, psi):
    """Angle ``phi(psi)`` solving ``r phi' = 1 - r k cos phi``, ``phi(0) = 0``.

    ``tan(phi/2) = sqrt((1-rk)/(1+rk)) tan(theta)`` with
    ``theta = sqrt(1-r^2k^2) psi / (2r)``; the branch is followed through the
    poles of ``tan`` so that ``[0, A]`` maps continuously onto ``[0, 2 pi]``.
    """
    psi = _check_psi(t, psi)
    theta = _tube_theta(t, psi)
    half = 2 * np.arctan2(math.sqrt(1 - t.rk) * np.sin(theta),
                          math.sqrt(1 + t.rk) * np.cos(theta))
    # phi and 2*theta agree at multiples of pi/2 and differ by < pi between
    turns = np.round((2 * theta - half) / (2 * math.pi))
    return half + 2 * math.pi * turns


def tube_h2_tangent_form(t: TubeParam, psi):
    """``h^2`` through ``T = tan(theta)``; singular at the poles of ``tan``."""
    T = np.tan(_tube_theta(t, _check_psi(t, psi)))
    rk = t.rk
    return (1 - rk * rk) * (1 + T * T) / ((1 + rk) + (1 - rk) * T * T)


def tube_h2(t: TubeParam, psi):
    """``h^2 = 1 - rk cos(phi(psi))`` in pole-free form.

    Multiplying the tangent form through by ``cos^2 theta`` gives
    ``(1 - r^2k^2) / (1 + rk cos(2 theta))``.
    """
    theta = _tube_theta(t, _check_psi(t, psi))
    rk = t.rk
    return (1 - rk * rk) / (1 + rk * np.cos(2 * theta))
