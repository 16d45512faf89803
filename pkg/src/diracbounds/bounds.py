"""Upper and lower bounds for the first eigenvalue of the squared Dirac operator.

All functions return a :class:`BoundValue`.  Values are bounds on
``lambda_1^2`` (units 1/length^2) unless ``normalized`` is set, in which
case they bound the scale-free product ``lambda_1^2 * vol``.

Extrinsic bounds (ellipsoid) come from Rayleigh quotients of test spinors
built from a rotationally symmetric function ``f(w)``; intrinsic bounds
(sphere, torus) come from a conformal factor ``h`` with ``g = h^4 g0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import (
    ConformalFactorField,
    EllipsoidParam,
    Lattice2,
    SpinStructure,
    TubeParam,
    delta_a,
    dual_lattice,
    ellipsoid_quantities,
    ellipsoid_volume_result,
    shortest_vector_norm2,
    tube_lattice,
    tube_mean_curvature,
    tube_volume,
)
from .quadrature import (
    DEFAULT_TOL,
    QuadratureResult,
    integrate_adaptive,
    integrate_periodic,
    integrate_semi_infinite,
)
from .uniformization import i1_result, solve_profile

PI = math.pi
PI2 = math.pi ** 2


class BoundKind(enum.Enum):
    LOWER_LB = "LOWER_LB"
    UPPER_H2 = "UPPER_H2"
    UPPER_T1 = "UPPER_T1"
    UPPER_T1_BETA1_CLOSED = "UPPER_T1_BETA1_CLOSED"
    UPPER_T2 = "UPPER_T2"
    UPPER_T3 = "UPPER_T3"
    UPPER_T4_STAR = "UPPER_T4_STAR"
    UPPER_T4_DSTAR = "UPPER_T4_DSTAR"
    UPPER_T4_CURV = "UPPER_T4_CURV"
    TUBE_STAR = "TUBE_STAR"
    TUBE_DSTAR = "TUBE_DSTAR"
    TUBE_H2 = "TUBE_H2"
    TUBE_TRIVIAL = "TUBE_TRIVIAL"

    @property
    def is_upper(self) -> bool:
        return self is not BoundKind.LOWER_LB


@dataclass(frozen=True)
class BoundValue:
    kind: BoundKind
    value: float
    normalized: bool = False
    error: float = 0.0
    details: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class TestFunctionPair:
    """Test functions ``f(w)`` and ``G: R -> R`` for the extrinsic bound.

    ``G = None`` means ``G == 0``.  ``df`` (``df/dw``) and ``dG`` are
    optional; missing derivatives are taken by central differences.
    """

    __test__ = False  # not a pytest class

    f: Callable
    G: Callable | None = None
    df: Callable | None = None
    dG: Callable | None = None


def _ratio(num: QuadratureResult, den: QuadratureResult) -> tuple[float, float]:
    if den.value == 0:
        raise ZeroDivisionError("vanishing denominator in Rayleigh quotient")
    value = num.value / den.value
    err = (num.error_estimate + abs(value) * den.error_estimate) / abs(den.value)
    return value, err


def _central_diff(fn, x, h=1e-3):
    x = np.asarray(x, dtype=float)
    return (8 * (fn(x + h) - fn(x - h)) - (fn(x + 2 * h) - fn(x - 2 * h))) / (12 * h)


def _as_a(surface) -> float:
    if isinstance(surface, EllipsoidParam):
        return surface.a
    return EllipsoidParam(float(surface)).a


# ---------------------------------------------------------------- genus zero


def lower_bound_genus0(vol: float) -> BoundValue:
    """``4 pi / vol``, valid for every metric on the sphere."""
    if not vol > 0:
        raise ValueError("volume must be positive")
    return BoundValue(BoundKind.LOWER_LB, 4 * PI / vol)


def classical_H2_bound(surface, tol: float = DEFAULT_TOL) -> BoundValue:
    """``int H^2 dM / vol`` for an ellipsoid or a tube."""
    if isinstance(surface, TubeParam):
        total = tube_h2_integral(surface, tol)
        vol = tube_volume(surface)
        return BoundValue(BoundKind.UPPER_H2, total / vol, error=tol / vol,
                          details={"integral_H2": total, "vol": vol})
    a = _as_a(surface)
    num = integrate_adaptive(
        lambda w: ellipsoid_quantities(a, w).H2 * np.sqrt(delta_a(a, w)),
        0.0, 1.0, tol, rtol=0.1 * tol,
    )
    den = integrate_adaptive(lambda w: np.sqrt(delta_a(a, w)), 0.0, 1.0, tol, rtol=0.1 * tol)
    value, err = _ratio(num, den)
    return BoundValue(BoundKind.UPPER_H2, value, error=err,
                      details={"integral_H2": 4 * PI * num.value, "vol": 4 * PI * den.value})


def extrinsic_bound_T1(surface, tf: TestFunctionPair, tol: float = DEFAULT_TOL) -> BoundValue:
    """Rayleigh quotient of the test spinor ``f phi_1 + G(f) phi_2`` on ``E(a)``.

    ``[int H^2 (f^2 + G(f)^2) + int |grad f|^2 (1 + G'(f)^2)] / int (f^2 + G(f)^2)``
    with ``|grad f|^2 = (1 - w^2) / Delta_a(w) * f'(w)^2`` and all integrals
    against ``dE = Delta_a^(1/2) dw dphi`` over ``w in [-1, 1]``.
    """
    a = _as_a(surface)
    f = tf.f
    df = tf.df if tf.df is not None else (lambda w: _central_diff(f, w))
    if tf.G is None:
        G = lambda y: np.zeros_like(y)
        dG = lambda y: np.zeros_like(y)
    else:
        G = tf.G
        dG = tf.dG if tf.dG is not None else (lambda y: _central_diff(G, y))

    def weight(w):
        fw = np.asarray(f(w), dtype=float)
        return fw, fw * fw + np.asarray(G(fw), dtype=float) ** 2

    def numerator(w):
        fw, mass = weight(w)
        d = delta_a(a, w)
        grad2 = (1 - w * w) / d * np.asarray(df(w), dtype=float) ** 2
        h2 = ellipsoid_quantities(a, w).H2
        return (h2 * mass + grad2 * (1 + np.asarray(dG(fw), dtype=float) ** 2)) * np.sqrt(d)

    def denominator(w):
        return weight(w)[1] * np.sqrt(delta_a(a, w))

    num = integrate_adaptive(numerator, -1.0, 1.0, tol, rtol=0.1 * tol)
    den = integrate_adaptive(denominator, -1.0, 1.0, tol, rtol=0.1 * tol)
    if den.value <= 0:
        raise ZeroDivisionError("test function vanishes identically")
    value, err = _ratio(num, den)
    return BoundValue(BoundKind.UPPER_T1, value, error=err)


def _beta_integrals(a, beta, tol):
    b2 = 4 * beta * beta * (1 - a * a) ** 2

    def numerator(w):
        d = delta_a(a, w)
        h2 = 0.25 * a * a * (d + 1) ** 2 / d ** 3
        return (h2 * d ** (2 * beta) + b2 * d ** (2 * beta - 3) * w * w * (1 - w * w)) * np.sqrt(d)

    def denominator(w):
        return delta_a(a, w) ** (2 * beta + 0.5)

    num = integrate_adaptive(numerator, 0.0, 1.0, tol, rtol=0.1 * tol)
    den = integrate_adaptive(denominator, 0.0, 1.0, tol, rtol=0.1 * tol)
    return num, den


def ellipsoid_beta_bound(a: float, beta: float, tol: float = DEFAULT_TOL) -> BoundValue:
    """Extrinsic bound with ``f = Delta_a(w)^beta``, ``G = 0``, ``beta > 1/2``."""
    a = _as_a(a)
    if not beta > 0.5:
        raise ValueError(f"beta must exceed 1/2, got {beta}")
    num, den = _beta_integrals(a, beta, tol)
    value, err = _ratio(num, den)
    return BoundValue(BoundKind.UPPER_T1, value, error=err, details={"beta": beta})


def _f_closed(a: float) -> float:
    # -artanh(e)/e for a < 1 and -arctan(e)/e for a > 1 are the log and
    # arcsin expressions rewritten; both tend to -1 as a -> 1
    if a < 1:
        e = math.sqrt((1 - a) * (1 + a))
        return -math.atanh(e) / e if e > 0 else -1.0
    if a > 1:
        e = math.sqrt((a - 1) * (a + 1))
        return -math.atan(e) / e
    return -1.0


def ellipsoid_beta1_closed_form(a: float) -> BoundValue:
    """Closed form of :func:`ellipsoid_beta_bound` at ``beta = 1``."""
    a = _as_a(a)
    f = _f_closed(a)
    a2, a4, a6 = a ** 2, a ** 4, a ** 6
    num = (2 + 13 * a2 / 8 + 3 * a4 / 16) + (7 * a2 / 2 - 3 * a4 / 2 - 3 * a6 / 16) * f
    den = (1 / 3 + 5 * a2 / 12 + 5 * a4 / 8) - 5 * a6 * f / 8
    return BoundValue(BoundKind.UPPER_T1_BETA1_CLOSED, num / den, details={"f": f})


def beta_limit_small_a(beta: float) -> float:
    """``lim sup_{a->0}`` of the beta bound: ``2 beta (2 beta + 1) / (2 beta - 1)``."""
    if not beta > 0.5:
        raise ValueError("beta must exceed 1/2")
    return 2 * beta * (2 * beta + 1) / (2 * beta - 1)


def beta_limit_large_a(beta: float, tol: float = DEFAULT_TOL) -> float:
    """``(1/4) int (1-w^2)^(2b-1/2) / int (1-w^2)^(2b+1/2)`` over ``[0, 1]``."""
    if not beta > 0.5:
        raise ValueError("beta must exceed 1/2")
    num = integrate_adaptive(lambda w: (1 - w * w) ** (2 * beta - 0.5), 0.0, 1.0, tol)
    den = integrate_adaptive(lambda w: (1 - w * w) ** (2 * beta + 0.5), 0.0, 1.0, tol)
    return 0.25 * num.value / den.value


def intrinsic_sphere_bound(vol: float, i1: float) -> BoundValue:
    """``(4 pi + I) / vol`` for a sphere uniformized with energy ``I``."""
    if not vol > 0:
        raise ValueError("volume must be positive")
    if i1 < 0:
        raise ValueError("uniformization energy must be non-negative")
    return BoundValue(BoundKind.UPPER_T2, (4 * PI + i1) / vol)


def ellipsoid_intrinsic_bound(a: float, tol: float = DEFAULT_TOL) -> BoundValue:
    """Intrinsic sphere bound on ``E(a)`` with the symmetric uniformization."""
    a = _as_a(a)
    vol = ellipsoid_volume_result(a, tol)
    energy = i1_result(a, tol)
    bound = intrinsic_sphere_bound(vol.value, energy.value)
    err = energy.error_estimate / vol.value + bound.value * vol.error_estimate / vol.value
    return BoundValue(BoundKind.UPPER_T2, bound.value, error=err,
                      details={"vol": vol.value, "I1": energy.value})


def conformal_sphere_bound(h: ConformalFactorField, tol: float = DEFAULT_TOL) -> BoundValue:
    """``(4 pi + int |grad h|^2 / h^2 dS^2) / vol(S^2, h^4 g0)``.

    ``h`` is a radial field on the stereographic chart, where
    ``g0 = 4 (dx^2 + x^2 dphi^2) / (1 + x^2)^2``.  Then
    ``int |grad log h|^2 dS^2 = 2 pi int_0^oo x (d log h/dx)^2 dx`` and
    ``vol = 2 pi int_0^oo h^4 4x / (1 + x^2)^2 dx``.
    """
    if not h.radial:
        raise TypeError("conformal_sphere_bound needs a radial sphere field")
    hf = h.func

    def check(vals):
        vals = np.asarray(vals, dtype=float)
        if np.any(vals <= 0):
            raise ValueError("conformal factor must be strictly positive")
        return vals

    if h.dlog is not None:
        dlog = h.dlog
    else:
        def dlog(x):
            step = 1e-3 * x
            logh = lambda y: np.log(check(hf(y)))
            return (8 * (logh(x + step) - logh(x - step))
                    - (logh(x + 2 * step) - logh(x - 2 * step))) / (12 * step)

    energy = integrate_semi_infinite(lambda x: x * np.asarray(dlog(x)) ** 2, 0.0, tol / (4 * PI))
    vol = integrate_semi_infinite(lambda x: check(hf(x)) ** 4 * 4 * x / (1 + x * x) ** 2,
                                  0.0, tol / (4 * PI))
    e_val, v_val = 2 * PI * energy.value, 2 * PI * vol.value
    value = (4 * PI + e_val) / v_val
    err = 2 * PI * (energy.error_estimate + value * vol.error_estimate) / v_val
    return BoundValue(BoundKind.UPPER_T2, value, error=err,
                      details={"vol": v_val, "energy": e_val})


def ellipsoid_conformal_field(a: float, tol: float = DEFAULT_TOL) -> ConformalFactorField:
    """Radial field ``h_a`` from the ellipsoid uniformization.

    No derivative is attached; :func:`conformal_sphere_bound` then
    differentiates numerically, independently of the reduced ``I_1`` path.
    """
    from .uniformization import conformal_factor_h4

    sol = solve_profile(a, tol)
    return ConformalFactorField.sphere(lambda x: conformal_factor_h4(sol, x) ** 0.25)


def ellipsoid_bounds(a: float, tol: float = DEFAULT_TOL, betas=(1.0,)) -> dict:
    """Every genus-zero bound available for ``E(a)``, keyed by a label."""
    a = _as_a(a)
    vol = ellipsoid_volume_result(a, tol)
    out = {
        "LOWER_LB": BoundValue(BoundKind.LOWER_LB, 4 * PI / vol.value,
                               error=4 * PI * vol.error_estimate / vol.value ** 2),
        "UPPER_H2": classical_H2_bound(a, tol),
        "UPPER_T1_BETA1_CLOSED": ellipsoid_beta1_closed_form(a),
        "UPPER_T2": ellipsoid_intrinsic_bound(a, tol),
    }
    for beta in betas:
        out[f"UPPER_T1(beta={beta:g})"] = ellipsoid_beta_bound(a, beta, tol)
    return out


def check_genus0_ordering(bounds: dict) -> list[str]:
    """Labels of upper bounds lying below the lower bound beyond their errors."""
    lower = bounds["LOWER_LB"]
    bad = []
    for label, b in bounds.items():
        if b.kind.is_upper and b.value < lower.value - (b.error + lower.error):
            bad.append(label)
    return bad


# -------------------------------------------------------------------- tori


def flat_torus_constant(lat: Lattice2, s: SpinStructure, form: str = "squared") -> float:
    """``lambda_1^2(g0) vol(T^2, g0)`` for a nontrivial spin structure.

    ``pi^2 |e1 v1* + e2 v2*|^2 / sqrt(|v1*|^2 |v2*|^2 - <v1*, v2*>^k)`` with
    ``k = 2`` (``form="squared"``, the Gram determinant, so the root is the
    torus area) or ``k = 1`` (``form="printed"``).  Returns ``nan`` when the
    printed radicand is negative.
    """
    d = dual_lattice(lat).matrix
    shift = s.eps1 * d[0] + s.eps2 * d[1]
    n1, n2, ip = d[0] @ d[0], d[1] @ d[1], d[0] @ d[1]
    if form == "squared":
        radicand = n1 * n2 - ip * ip
    elif form == "printed":
        radicand = n1 * n2 - ip
    else:
        raise ValueError(f"unknown form {form!r}")
    if radicand <= 0:
        return float("nan")
    return PI2 * float(shift @ shift) / math.sqrt(radicand)


@dataclass(frozen=True)
class _TorusGrid:
    """Spectral quantities of ``log h`` on one uniform grid."""

    lattice: Lattice2
    h: np.ndarray

    @property
    def shape(self):
        return self.h.shape

    def integral(self, values) -> float:
        return self.lattice.area * float(np.mean(values))

    def _wavenumbers(self):
        nx, ny = self.shape
        kx = 2j * PI * np.fft.fftfreq(nx, d=1.0 / nx)
        ky = 2j * PI * np.fft.fftfreq(ny, d=1.0 / ny)
        return kx[:, None], ky[None, :]

    def _derivatives(self):
        logh = np.log(self.h)
        spec = np.fft.fft2(logh)
        kx, ky = self._wavenumbers()
        nx, ny = self.shape
        # drop the unpaired Nyquist mode for odd derivatives
        kx1 = kx.copy()
        ky1 = ky.copy()
        if nx % 2 == 0:
            kx1[nx // 2] = 0
        if ny % 2 == 0:
            ky1[0, ny // 2] = 0
        du = np.fft.ifft2(kx1 * spec).real
        dv = np.fft.ifft2(ky1 * spec).real
        duu = np.fft.ifft2(kx * kx * spec).real
        dvv = np.fft.ifft2(ky * ky * spec).real
        duv = np.fft.ifft2(kx1 * ky1 * spec).real
        return logh, du, dv, duu, dvv, duv

    def fields(self):
        """``log h``, ``|grad log h|^2`` and the flat Laplacian of ``log h``."""
        logh, du, dv, duu, dvv, duv = self._derivatives()
        ginv = np.linalg.inv(self.lattice.gram)
        grad2 = ginv[0, 0] * du * du + 2 * ginv[0, 1] * du * dv + ginv[1, 1] * dv * dv
        lap = ginv[0, 0] * duu + 2 * ginv[0, 1] * duv + ginv[1, 1] * dvv
        return logh, grad2, lap


def _torus_evaluate(h: ConformalFactorField, lat: Lattice2 | None, evaluate, tol: float,
                    n0: int = 32, max_n: int = 2048):
    """Run ``evaluate(grid) -> dict`` (key ``value`` required) at doubling resolution.

    Grid fields are evaluated once at their own resolution.
    """
    if h.radial:
        raise TypeError("torus bounds need a torus field")
    lattice = lat if lat is not None else h.lattice
    if h.is_grid:
        out = evaluate(_TorusGrid(lattice, h.sample(0)))
        out["error"] = 0.0
        out["resolution"] = h.samples.shape
        return out
    prev = evaluate(_TorusGrid(lattice, h.sample(n0)))
    n = n0
    while True:
        n *= 2
        cur = evaluate(_TorusGrid(lattice, h.sample(n)))
        diff = abs(cur["value"] - prev["value"])
        if diff <= max(tol, 4 * np.finfo(float).eps * abs(cur["value"])) or n >= max_n:
            cur["error"] = diff
            cur["resolution"] = (n, n)
            cur["converged"] = diff <= max(tol, 4 * np.finfo(float).eps * abs(cur["value"]))
            return cur
        prev = cur


def _spin_shift2(lat: Lattice2, s: SpinStructure) -> float:
    d = dual_lattice(lat).matrix
    shift = s.eps1 * d[0] + s.eps2 * d[1]
    return float(shift @ shift)


def _require_nontrivial(s: SpinStructure):
    if s.trivial:
        raise ValueError("trivial spin structure has harmonic spinors; use torus_trivial_bound")


def _pack(kind, out, normalized, extra=()):
    details = {k: v for k, v in out.items() if k not in ("value", "error")}
    return BoundValue(kind, out["value"], normalized=normalized, error=out["error"],
                      details=details)


def torus_trivial_bound(h: ConformalFactorField, lat: Lattice2 | None = None,
                        tol: float = DEFAULT_TOL) -> BoundValue:
    """First positive eigenvalue bound for the trivial spin structure.

    ``int {lambda_1^2(g0) + 4 |grad h|^2 / h^2} h^-6 dT / int h^-2 dT`` with
    ``lambda_1^2(g0) = 4 pi^2 min |v*|^2`` over the nonzero dual lattice.
    """
    lattice = lat if lat is not None else h.lattice
    lam0 = 4 * PI2 * shortest_vector_norm2(dual_lattice(lattice))

    def evaluate(grid):
        logh, grad2, _ = grid.fields()
        hm6 = grid.h ** -6
        num = grid.integral((lam0 + 4 * grad2) * hm6)
        den = grid.integral(grid.h ** -2)
        return {"value": num / den, "lambda0": lam0}

    return _pack(BoundKind.UPPER_T3, _torus_evaluate(h, lattice, evaluate, tol), False)


def torus_spin_bound_ratio(h: ConformalFactorField, lat: Lattice2 | None, s: SpinStructure,
                           tol: float = DEFAULT_TOL, normalized: bool = False) -> BoundValue:
    """``pi^2 |e1 v1* + e2 v2*|^2 int h^-2 dT / int h^2 dT``."""
    _require_nontrivial(s)
    lattice = lat if lat is not None else h.lattice
    factor = PI2 * _spin_shift2(lattice, s)

    def evaluate(grid):
        ratio = grid.integral(grid.h ** -2) / grid.integral(grid.h ** 2)
        vol = grid.integral(grid.h ** 4)
        value = factor * ratio * (vol if normalized else 1.0)
        return {"value": value, "ratio": ratio, "vol": vol}

    return _pack(BoundKind.UPPER_T4_STAR, _torus_evaluate(h, lattice, evaluate, tol), normalized)


def torus_spin_bound_gradient(h: ConformalFactorField, lat: Lattice2 | None, s: SpinStructure,
                              tol: float = DEFAULT_TOL, normalized: bool = True,
                              form: str = "squared") -> BoundValue:
    """``lambda_1^2 vol <= lambda_1^2(g0) vol(T, g0) + int |grad h|^2 / h^2 dT``.

    Both forms of the flat constant are reported in ``details``; ``form``
    selects the one used for the value.
    """
    _require_nontrivial(s)
    lattice = lat if lat is not None else h.lattice
    consts = {f: flat_torus_constant(lattice, s, f) for f in ("squared", "printed")}
    const = consts[form]

    def evaluate(grid):
        _, grad2, _ = grid.fields()
        energy = grid.integral(grad2)
        vol = grid.integral(grid.h ** 4)
        total = const + energy
        return {"value": total if normalized else total / vol, "energy": energy, "vol": vol}

    out = _torus_evaluate(h, lattice, evaluate, tol)
    out["constant_squared"] = consts["squared"]
    out["constant_printed"] = consts["printed"]
    out["constant_discrepancy"] = abs(consts["squared"] - consts["printed"])
    return _pack(BoundKind.UPPER_T4_DSTAR, out, normalized)


def torus_curvature_bound(h: ConformalFactorField, lat: Lattice2 | None, s: SpinStructure,
                          tol: float = DEFAULT_TOL, normalized: bool = True,
                          form: str = "squared") -> BoundValue:
    """Gradient bound rewritten through the Gaussian curvature ``K`` of ``h^4 g0``.

    ``K = -2 h^-4 lap(log h)`` with ``lap`` the flat (non-negative
    definite sign convention: ``lap = d_xx + d_yy``) Laplacian, so that
    ``int K log h dM = 2 int |grad h|^2 / h^2 dT`` and the bound reads
    ``lambda_1^2 vol <= C + (1/2) int K log h dM``.  ``details`` also carries
    the value with the opposite sign in front of the curvature term.
    """
    _require_nontrivial(s)
    lattice = lat if lat is not None else h.lattice
    const = flat_torus_constant(lattice, s, form)

    def evaluate(grid):
        logh, _, lap = grid.fields()
        h4 = grid.h ** 4
        curvature = -2.0 * lap / h4
        k_log_h = grid.integral(h4 * curvature * logh)
        vol = grid.integral(h4)
        total = const + 0.5 * k_log_h
        return {
            "value": total if normalized else total / vol,
            "integral_K_log_h": k_log_h,
            "opposite_sign_value": const - 0.5 * k_log_h,
            "vol": vol,
        }

    return _pack(BoundKind.UPPER_T4_CURV, _torus_evaluate(h, lattice, evaluate, tol), normalized)


def gaussian_curvature_grid(h: ConformalFactorField, n: int = 64) -> np.ndarray:
    """``K = -2 h^-4 lap(log h)`` sampled on the uniform grid."""
    grid = _TorusGrid(h.lattice, h.sample(n))
    _, _, lap = grid.fields()
    return -2.0 * lap / grid.h ** 4


# -------------------------------------------------------------------- tubes


def _tube_h2_unchecked(t: TubeParam, psi):
    theta = math.sqrt(1 - t.rk ** 2) * psi / (2 * t.r)
    return (1 - t.rk ** 2) / (1 + t.rk * np.cos(2 * theta))


def tube_conformal_field(t: TubeParam) -> ConformalFactorField:
    """``h(s, psi) = (1 - rk cos phi(psi))^(1/2)`` on the tube lattice."""
    return ConformalFactorField.torus(
        lambda x, y: np.sqrt(_tube_h2_unchecked(t, y)), tube_lattice(t)
    )


def tube_ratio(t: TubeParam) -> float:
    """``int h^-2 dT / int h^2 dT = (1 - r^2 k^2)^(-3/2)``."""
    return (1 - t.rk ** 2) ** -1.5


def tube_ratio_quadrature(rk: float, tol: float = 1e-13) -> float:
    """``(1/2pi) int_0^2pi (1 - rk cos phi)^-2 dphi`` by the periodic rule."""
    return integrate_periodic(lambda p: (1 - rk * np.cos(p)) ** -2, 2 * PI, 16, tol=tol) / (2 * PI)


def tube_gradient_energy(t: TubeParam, tol: float = 1e-13) -> float:
    """``int |grad h|^2 / h^2 dT = (pi rk / 2) int_0^2pi sin^2 / (1 - rk cos) dphi``."""
    rk = t.rk
    return 0.5 * PI * rk * integrate_periodic(
        lambda p: np.sin(p) ** 2 / (1 - rk * np.cos(p)), 2 * PI, 16, tol=tol)


def tube_gradient_energy_closed(t: TubeParam) -> float:
    rk = t.rk
    return PI2 / rk * (1 - math.sqrt(1 - rk * rk))


def tube_h2_integral(t: TubeParam, tol: float = 1e-13) -> float:
    """``int H^2 dM`` over the tube, by the periodic rule in ``phi``."""
    rk = t.rk

    def integrand(phi):
        return tube_mean_curvature(t, phi) ** 2 * t.r * (1 - rk * np.cos(phi))

    return t.length * integrate_periodic(integrand, 2 * PI, 16, tol=tol)


def _tube_spin_factor(t: TubeParam, s: SpinStructure) -> float:
    rk = t.rk
    return rk * s.eps1 + (1 - rk * rk) * s.eps2 / rk


def tube_bound_star(t: TubeParam, s: SpinStructure, normalized: bool = True) -> BoundValue:
    """Ratio-form bound on the tube, closed form.

    ``lambda_1^2 <= (1/4)(k^2 e1 + (1 - r^2k^2) e2 / r^2)(1 - r^2k^2)^(-3/2)``;
    normalized: ``pi^2 (rk e1 + (1 - r^2k^2) e2 / (rk)) (1 - r^2k^2)^(-3/2)``.
    """
    _require_nontrivial(s)
    ratio = tube_ratio(t)
    if normalized:
        value = PI2 * _tube_spin_factor(t, s) * ratio
    else:
        value = 0.25 * (t.kappa ** 2 * s.eps1 + (1 - t.rk ** 2) * s.eps2 / t.r ** 2) * ratio
    return BoundValue(BoundKind.TUBE_STAR, value, normalized=normalized, details={"ratio": ratio})


def tube_bound_dstar(t: TubeParam, s: SpinStructure, normalized: bool = True) -> BoundValue:
    """Gradient-form bound on the tube, closed form.

    ``pi^2 (rk e1 + (1 - r^2k^2) e2 / (rk)) / sqrt(1 - r^2k^2)
    + (pi^2 / rk)(1 - sqrt(1 - r^2k^2))``, divided by the volume unless
    ``normalized``.
    """
    _require_nontrivial(s)
    rk = t.rk
    root = math.sqrt(1 - rk * rk)
    value = PI2 * _tube_spin_factor(t, s) / root + PI2 / rk * (1 - root)
    if not normalized:
        value /= tube_volume(t)
    return BoundValue(BoundKind.TUBE_DSTAR, value, normalized=normalized)


def tube_bound_h2(t: TubeParam, tol: float = 1e-13, normalized: bool = True) -> BoundValue:
    """Extrinsic bound ``lambda_1^2 vol <= int H^2 dM`` (induced spin structure)."""
    total = tube_h2_integral(t, tol)
    value = total if normalized else total / tube_volume(t)
    closed = PI2 / (t.rk * math.sqrt(1 - t.rk ** 2))
    return BoundValue(BoundKind.TUBE_H2, value, normalized=normalized,
                      error=tol, details={"closed_form_normalized": closed})


def tube_trivial_bound(t: TubeParam, tol: float = 1e-13, factor: str = "printed") -> BoundValue:
    """Trivial spin structure on the tube.

    ``c * int (1 - rk cos)^-4 dphi / int (1 - rk cos)^-2 dphi`` with
    ``c = min(2 k^2, 1/r^2)`` (``factor="printed"``) or
    ``c = 4 pi^2 min |v*|^2 = min(k^2, (1 - r^2k^2)/r^2)`` (``factor="lattice"``).
    """
    rk = t.rk
    if factor == "printed":
        c = min(2 * t.kappa ** 2, 1 / t.r ** 2)
    elif factor == "lattice":
        c = min(t.kappa ** 2, (1 - rk * rk) / t.r ** 2)
    else:
        raise ValueError(f"unknown factor {factor!r}")
    num = integrate_periodic(lambda p: (1 - rk * np.cos(p)) ** -4, 2 * PI, 16, tol=tol)
    den = integrate_periodic(lambda p: (1 - rk * np.cos(p)) ** -2, 2 * PI, 16, tol=tol)
    return BoundValue(BoundKind.TUBE_TRIVIAL, c * num / den, error=tol,
                      details={"factor": c, "integral_ratio": num / den})
