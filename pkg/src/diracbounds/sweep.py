"""Parameter sweeps over a surface family and CSV / SVG emission."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import bounds as B
from .geometry import (
    ConformalFactorField,
    EllipsoidParam,
    Lattice2,
    SpinStructure,
    TubeParam,
    delta_a,
    ellipsoid_volume,
    tube_volume,
)
from .quadrature import DEFAULT_TOL, QuadratureError


class Family(enum.Enum):
    ELLIPSOID = "ELLIPSOID"
    TUBE = "TUBE"
    TORUS = "TORUS"


FAMILY_KINDS = {
    Family.ELLIPSOID: {
        B.BoundKind.LOWER_LB, B.BoundKind.UPPER_H2, B.BoundKind.UPPER_T1,
        B.BoundKind.UPPER_T1_BETA1_CLOSED, B.BoundKind.UPPER_T2,
    },
    Family.TUBE: {
        B.BoundKind.TUBE_STAR, B.BoundKind.TUBE_DSTAR, B.BoundKind.TUBE_H2,
        B.BoundKind.TUBE_TRIVIAL,
    },
    Family.TORUS: {
        B.BoundKind.UPPER_T3, B.BoundKind.UPPER_T4_STAR, B.BoundKind.UPPER_T4_DSTAR,
        B.BoundKind.UPPER_T4_CURV,
    },
}


@dataclass(frozen=True)
class SeriesRequest:
    """One curve: a bound kind, with ``beta`` for the ``f = Delta^beta`` family."""

    kind: B.BoundKind
    beta: float | None = None

    @property
    def label(self) -> str:
        if self.beta is None:
            return self.kind.value
        return f"{self.kind.value}@{self.beta:g}"

    @classmethod
    def parse(cls, text: str) -> "SeriesRequest":
        name, _, beta = text.strip().partition("@")
        try:
            kind = B.BoundKind[name.upper()]
        except KeyError:
            raise ValueError(f"unknown bound kind {name!r}") from None
        if kind is B.BoundKind.UPPER_T1 and not beta:
            raise ValueError("UPPER_T1 needs an exponent, e.g. UPPER_T1@1")
        return cls(kind, float(beta) if beta else None)


def parse_grid(text: str) -> tuple[float, ...]:
    """``lo:hi:n`` (inclusive, ``n`` points) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be lo:hi:n, got {text!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ValueError("grid needs at least one point")
        if n == 1:
            return (lo,)
        return tuple(float(x) for x in np.linspace(lo, hi, n))
    values = tuple(float(x) for x in text.split(",") if x.strip())
    if not values:
        raise ValueError("empty grid")
    return values


@dataclass(frozen=True)
class SweepSpec:
    """What to evaluate and where.

    ``grid`` is ``a`` for ellipsoids, ``r*kappa`` for tubes (at fixed
    ``kappa``) and the amplitude ``c`` of ``h = 1 + c cos(2 pi u)`` for
    tori on ``lattice``.
    """

    family: Family
    grid: tuple[float, ...]
    series: tuple[SeriesRequest, ...]
    spin: SpinStructure | None = None
    tol: float = DEFAULT_TOL
    normalized: bool = False
    pi2_units: bool = False
    kappa: float = 1.0
    lattice: Lattice2 | None = None
    y_max: float | None = None
    reference_lines: tuple[float, ...] = ()
    trivial_factor: str = "printed"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        if not self.grid:
            raise ValueError("grid must be nonempty")
        if not self.series:
            raise ValueError("no bound kinds requested")
        for req in self.series:
            if req.kind not in FAMILY_KINDS[self.family]:
                raise ValueError(f"{req.kind.value} does not apply to {self.family.value}")
        if self.family is Family.ELLIPSOID:
            if any(not x > 0 for x in self.grid):
                raise ValueError("ellipsoid parameters must be positive")
        elif self.family is Family.TUBE:
            if any(not 0 < x < 1 for x in self.grid):
                raise ValueError("tube grid is r*kappa and must lie in (0, 1)")
            needs_spin = {B.BoundKind.TUBE_STAR, B.BoundKind.TUBE_DSTAR}
            if any(r.kind in needs_spin for r in self.series):
                if self.spin is None or self.spin.trivial:
                    raise ValueError("tube (*) and (**) need a nontrivial spin structure")
            if any(r.kind is B.BoundKind.TUBE_H2 for r in self.series):
                if self.spin != SpinStructure(1, 1):
                    raise ValueError("the mean-curvature bound holds for the induced structure 1,1")
        else:
            if self.lattice is None:
                raise ValueError("torus sweeps need a lattice")
            if any(not abs(x) < 1 for x in self.grid):
                raise ValueError("torus amplitude must satisfy |c| < 1 to keep h positive")
            if any(r.kind is not B.BoundKind.UPPER_T3 for r in self.series):
                if self.spin is None or self.spin.trivial:
                    raise ValueError("spin bounds need a nontrivial spin structure")


@dataclass
class BoundCurve:
    params: tuple[float, ...]
    labels: tuple[str, ...]
    values: dict[str, list[float]]
    errors: dict[str, list[float]]
    family: Family
    normalized: bool = False
    pi2_units: bool = False
    failures: list[tuple[int, str, str]] = field(default_factory=list)
    y_max: float | None = None
    reference_lines: tuple[float, ...] = ()

    @classmethod
    def empty(cls, labels=(), family=Family.ELLIPSOID) -> "BoundCurve":
        return cls((), tuple(labels), {k: [] for k in labels}, {k: [] for k in labels}, family)

    def __len__(self):
        return len(self.params)


class OrderingViolation(ValueError):
    pass


def _ellipsoid_point(a: float, req: SeriesRequest, tol: float, normalized: bool):
    kind = req.kind
    if kind is B.BoundKind.LOWER_LB:
        bv = B.lower_bound_genus0(ellipsoid_volume(a, tol))
    elif kind is B.BoundKind.UPPER_H2:
        bv = B.classical_H2_bound(EllipsoidParam(a), tol)
    elif kind is B.BoundKind.UPPER_T1_BETA1_CLOSED:
        bv = B.ellipsoid_beta1_closed_form(a)
    elif kind is B.BoundKind.UPPER_T2:
        bv = B.ellipsoid_intrinsic_bound(a, tol)
    elif req.beta > 0.5:
        bv = B.ellipsoid_beta_bound(a, req.beta, tol)
    else:
        # the reduced family rejects beta <= 1/2; the generic quotient does not
        beta = req.beta
        tf = B.TestFunctionPair(
            f=lambda w: delta_a(a, w) ** beta,
            df=lambda w: 2 * beta * (1 - a * a) * w * delta_a(a, w) ** (beta - 1),
        )
        bv = B.extrinsic_bound_T1(a, tf, tol)
    value, err = bv.value, bv.error
    if normalized:
        vol = ellipsoid_volume(a, tol)
        value, err = value * vol, err * vol
    return value, err


def _tube_point(rk: float, spec: SweepSpec, req: SeriesRequest):
    t = TubeParam(spec.kappa, rk / spec.kappa)
    kind = req.kind
    if kind is B.BoundKind.TUBE_STAR:
        bv = B.tube_bound_star(t, spec.spin, normalized=spec.normalized)
    elif kind is B.BoundKind.TUBE_DSTAR:
        bv = B.tube_bound_dstar(t, spec.spin, normalized=spec.normalized)
    elif kind is B.BoundKind.TUBE_H2:
        bv = B.tube_bound_h2(t, min(spec.tol, 1e-12), normalized=spec.normalized)
    else:
        bv = B.tube_trivial_bound(t, min(spec.tol, 1e-12), factor=spec.trivial_factor)
        if spec.normalized:
            vol = tube_volume(t)
            return bv.value * vol, bv.error * vol
    return bv.value, bv.error


def torus_cosine_field(lattice: Lattice2, amplitude: float) -> ConformalFactorField:
    """``h = 1 + c cos(2 pi u)``, ``u`` the first lattice coordinate."""
    dual = np.array(lattice.dual().v1)
    return ConformalFactorField.torus(
        lambda x, y: 1.0 + amplitude * np.cos(2 * math.pi * (dual[0] * x + dual[1] * y)),
        lattice,
    )


def _torus_point(c: float, spec: SweepSpec, req: SeriesRequest):
    h = torus_cosine_field(spec.lattice, c)
    kind = req.kind
    if kind is B.BoundKind.UPPER_T3:
        bv = B.torus_trivial_bound(h, spec.lattice, spec.tol)
        if spec.normalized:
            vol = _torus_volume(h, spec.lattice)
            return bv.value * vol, bv.error * vol
        return bv.value, bv.error
    if kind is B.BoundKind.UPPER_T4_STAR:
        bv = B.torus_spin_bound_ratio(h, spec.lattice, spec.spin, spec.tol, spec.normalized)
    elif kind is B.BoundKind.UPPER_T4_DSTAR:
        bv = B.torus_spin_bound_gradient(h, spec.lattice, spec.spin, spec.tol, spec.normalized)
    else:
        bv = B.torus_curvature_bound(h, spec.lattice, spec.spin, spec.tol, spec.normalized)
    return bv.value, bv.error


def _torus_volume(h: ConformalFactorField, lattice: Lattice2, n: int = 256) -> float:
    return lattice.area * float(np.mean(h.sample(n) ** 4))


def run_sweep(spec: SweepSpec) -> BoundCurve:
    """Evaluate every requested series at every grid point, in grid order.

    A failing point is stored as ``nan`` and listed in ``failures``.
    """
    labels = tuple(req.label for req in spec.series)
    curve = BoundCurve(spec.grid, labels, {k: [] for k in labels}, {k: [] for k in labels},
                       spec.family, spec.normalized, spec.pi2_units,
                       y_max=spec.y_max, reference_lines=spec.reference_lines)
    scale = 1 / math.pi ** 2 if spec.pi2_units else 1.0
    for i, p in enumerate(spec.grid):
        for req in spec.series:
            try:
                if spec.family is Family.ELLIPSOID:
                    value, err = _ellipsoid_point(p, req, spec.tol, spec.normalized)
                elif spec.family is Family.TUBE:
                    value, err = _tube_point(p, spec, req)
                else:
                    value, err = _torus_point(p, spec, req)
                if not math.isfinite(value):
                    raise ArithmeticError(f"non-finite value {value!r}")
            except (QuadratureError, ArithmeticError, ValueError) as exc:
                curve.failures.append((i, req.label, str(exc)))
                value, err = float("nan"), float("nan")
            curve.values[req.label].append(value * scale)
            curve.errors[req.label].append(err * scale)
    return curve


def check_curve_ordering(curve: BoundCurve) -> list[tuple[int, str]]:
    """Grid points where an upper bound dips below the genus-zero lower bound."""
    lower = B.BoundKind.LOWER_LB.value
    if curve.family is not Family.ELLIPSOID or lower not in curve.values:
        return []
    bad = []
    for label in curve.labels:
        if label == lower:
            continue
        for i, (v, e) in enumerate(zip(curve.values[label], curve.errors[label])):
            lb, lbe = curve.values[lower][i], curve.errors[lower][i]
            if math.isfinite(v) and math.isfinite(lb) and v < lb - (e + lbe):
                bad.append((i, label))
    return bad


def _fmt(x: float) -> str:
    return format(x, ".17g")


def emit_csv(curve: BoundCurve, path) -> None:
    """Write ``param,<label>,<label>_err,...`` with 17 significant digits."""
    bad = check_curve_ordering(curve)
    if bad:
        raise OrderingViolation(f"upper bound below lower bound at {bad}")
    header = ["param"]
    for label in curve.labels:
        header += [label, f"{label}_err"]
    lines = [",".join(header)]
    for i, p in enumerate(curve.params):
        row = [_fmt(p)]
        for label in curve.labels:
            row += [_fmt(curve.values[label][i]), _fmt(curve.errors[label][i])]
        lines.append(",".join(row))
    path = Path(path)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror}") from exc


_STYLES = [
    ("#000000", ""),
    ("#1f4e9c", ""),
    ("#b22222", "3,3"),
    ("#2e7d32", "10,5"),
    ("#6a1b9a", "2,2,8,2"),
    ("#ef6c00", "6,2"),
]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step + 1e-9) + 1)]


def _param_name(family: Family) -> str:
    return {Family.ELLIPSOID: "a", Family.TUBE: "r kappa", Family.TORUS: "amplitude"}[family]


def emit_svg(curve: BoundCurve, path, width: int = 640, height: int = 420) -> None:
    """Static line chart: one polyline per series, labelled axes and legend."""
    left, right, top, bottom = 70, 170, 20, 50
    pw, ph = width - left - right, height - top - bottom
    xs = np.asarray(curve.params, dtype=float)
    finite = [v for k in curve.labels for v in curve.values[k] if math.isfinite(v)]
    finite += list(curve.reference_lines)
    x_lo, x_hi = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo = min(0.0, min(finite, default=0.0))
    y_hi = max(finite, default=1.0)
    if curve.y_max is not None:
        y_hi = min(y_hi, curve.y_max)
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        y = min(max(y, y_lo), y_hi)
        return top + (1 - (y - y_lo) / (y_hi - y_lo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="#000"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        y = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="#000"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{t:g}</text>')
    ylabel = "lambda_1^2 vol" if curve.normalized else "lambda_1^2"
    if curve.pi2_units:
        ylabel += " / pi^2"
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">'
               f'{escape(_param_name(curve.family))}</text>')
    out.append(f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2})">{escape(ylabel)}</text>')
    for ref in curve.reference_lines:
        y = sy(ref)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" '
                   f'stroke="#888" stroke-dasharray="1,3"/>')
    for k, label in enumerate(curve.labels):
        color, dash = _STYLES[k % len(_STYLES)]
        pts = [f"{sx(x):.2f},{sy(v):.2f}"
               for x, v in zip(curve.params, curve.values[label]) if math.isfinite(v)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} '
                   f'points="{" ".join(pts)}"><title>{escape(label)}</title></polyline>')
        ly = top + 14 + 16 * k
        lx = left + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="1.5"{dash_attr}/>')
        out.append(f'<text x="{lx + 30}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    path = Path(path)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(out) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc.strerror}") from exc


def figure_specs(tol: float = 1e-9, points: int = 19) -> dict[str, SweepSpec]:
    """The five comparison datasets: two ellipsoid ranges and three tube spin structures."""
    K = B.BoundKind
    genus0 = (SeriesRequest(K.LOWER_LB), SeriesRequest(K.UPPER_H2),
              SeriesRequest(K.UPPER_T1, 0.5), SeriesRequest(K.UPPER_T1, 1.0))
    small = tuple(np.linspace(0.05, 0.95, points))
    large = tuple(np.linspace(1.0, 10.0, points))
    rk = tuple(np.linspace(0.05, 0.95, points))
    tube = (SeriesRequest(K.TUBE_STAR), SeriesRequest(K.TUBE_DSTAR))
    common = dict(tol=tol, normalized=True, pi2_units=True, reference_lines=(2.0,), y_max=12.0)
    return {
        "fig1_ellipsoid_oblate": SweepSpec(Family.ELLIPSOID, small, genus0, tol=tol, y_max=12.0),
        "fig2_ellipsoid_prolate": SweepSpec(Family.ELLIPSOID, large, genus0, tol=tol),
        "fig3_tube_spin10": SweepSpec(Family.TUBE, rk, tube, SpinStructure(1, 0), **common),
        "fig4_tube_spin01": SweepSpec(Family.TUBE, rk, tube, SpinStructure(0, 1), **common),
        "fig5_tube_spin11": SweepSpec(Family.TUBE, rk, tube + (SeriesRequest(K.TUBE_H2),),
                                      SpinStructure(1, 1), **common),
    }
