"""Surface families, lattices and spin structures.

Two concrete surfaces are modelled:

* the ellipsoid ``x^2 + y^2 + z^2/a^2 = 1`` in the chart
  ``(sqrt(1-w^2) cos phi, sqrt(1-w^2) sin phi, a w)``, ``|w| <= 1``;
* the tube of radius ``r`` around a planar circle of curvature ``kappa``,
  with metric ``(1 - r kappa cos phi)^2 ds^2 + r^2 dphi^2``.

Flat tori are described by a :class:`Lattice2` and a :class:`SpinStructure`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .quadrature import DEFAULT_TOL, QuadratureResult, integrate_adaptive

__all__ = [
    "EllipsoidParam",
    "TubeParam",
    "Lattice2",
    "SpinStructure",
    "EllipsoidQuantities",
    "ConformalFactorField",
    "delta_a",
    "ellipsoid_quantities",
    "ellipsoid_volume",
    "dual_lattice",
    "tube_lattice",
    "tube_volume",
    "tube_mean_curvature",
    "tube_gauss_curvature",
    "shortest_vector_norm2",
    "read_grid_file",
    "write_grid_file",
]


@dataclass(frozen=True)
class EllipsoidParam:
    a: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"ellipsoid half-axis ratio must be positive, got {self.a}")


@dataclass(frozen=True)
class TubeParam:
    kappa: float
    r: float

    def __post_init__(self):
        if not (self.kappa > 0 and self.r > 0):
            raise ValueError("kappa and r must be positive")
        if not self.r * self.kappa < 1:
            raise ValueError(
                f"tube is not embedded: r*kappa = {self.r * self.kappa} must be < 1"
            )

    @property
    def rk(self) -> float:
        return self.r * self.kappa

    @property
    def length(self) -> float:
        """Length ``L = 2 pi / kappa`` of the core circle."""
        return 2 * math.pi / self.kappa

    @property
    def period(self) -> float:
        """Conformal period ``A = 2 pi r / sqrt(1 - r^2 kappa^2)``."""
        return 2 * math.pi * self.r / math.sqrt(1 - self.rk ** 2)


@dataclass(frozen=True)
class SpinStructure:
    eps1: int = 0
    eps2: int = 0

    def __post_init__(self):
        if self.eps1 not in (0, 1) or self.eps2 not in (0, 1):
            raise ValueError("spin structure entries must be 0 or 1")

    @property
    def trivial(self) -> bool:
        return self.eps1 == 0 and self.eps2 == 0

    @classmethod
    def parse(cls, text: str) -> "SpinStructure":
        e1, e2 = (int(part) for part in text.split(","))
        return cls(e1, e2)

    def __str__(self):
        return f"{self.eps1},{self.eps2}"


@dataclass(frozen=True)
class Lattice2:
    """Lattice in R^2 spanned by ``v1`` and ``v2``."""

    v1: tuple[float, float]
    v2: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "v1", tuple(float(c) for c in self.v1))
        object.__setattr__(self, "v2", tuple(float(c) for c in self.v2))
        scale = math.hypot(*self.v1) * math.hypot(*self.v2)
        if not scale > 0 or abs(self.det) <= 1e-14 * scale:
            raise ValueError("lattice basis vectors must be linearly independent")

    @property
    def matrix(self) -> np.ndarray:
        """Basis vectors as rows."""
        return np.array([self.v1, self.v2])

    @property
    def det(self) -> float:
        return self.v1[0] * self.v2[1] - self.v1[1] * self.v2[0]

    @property
    def area(self) -> float:
        return abs(self.det)

    @property
    def gram(self) -> np.ndarray:
        m = self.matrix
        return m @ m.T

    def dual(self) -> "Lattice2":
        return dual_lattice(self)

    def scaled(self, c: float) -> "Lattice2":
        return Lattice2(tuple(c * x for x in self.v1), tuple(c * x for x in self.v2))

    @classmethod
    def rectangular(cls, width: float, height: float) -> "Lattice2":
        return cls((width, 0.0), (0.0, height))

    @classmethod
    def parse(cls, text: str) -> "Lattice2":
        x1, y1, x2, y2 = (float(part) for part in text.split(","))
        return cls((x1, y1), (x2, y2))


class EllipsoidQuantities(NamedTuple):
    H2: float
    K_gauss: float
    area_density: float


def delta_a(a, w):
    """``(1 - a^2) w^2 + a^2``; equals 1 at ``w = +-1`` for every ``a``."""
    return (1.0 - a * a) * w * w + a * a


def ellipsoid_quantities(a, w) -> EllipsoidQuantities:
    """Squared mean curvature, Gaussian curvature and area density at ``w``.

    The area density is with respect to ``dw dphi``.
    """
    d = delta_a(a, w)
    return EllipsoidQuantities(
        H2=0.25 * a * a * (d + 1.0) ** 2 / d ** 3,
        K_gauss=a * a / (d * d),
        area_density=np.sqrt(d),
    )


def ellipsoid_volume_result(a: float, tol: float = DEFAULT_TOL) -> QuadratureResult:
    res = integrate_adaptive(lambda w: np.sqrt(delta_a(a, w)), 0.0, 1.0, tol / (4 * math.pi))
    return QuadratureResult(4 * math.pi * res.value, 4 * math.pi * res.error_estimate,
                            res.evaluations)


def ellipsoid_volume(a: float, tol: float = DEFAULT_TOL) -> float:
    """Surface area of ``E(a)``, ``4 pi int_0^1 Delta_a(w)^(1/2) dw``."""
    EllipsoidParam(a)
    return ellipsoid_volume_result(a, tol).value


def dual_lattice(lat: Lattice2) -> Lattice2:
    """Basis ``v1*, v2*`` with ``<v_i, v_j*> = delta_ij``."""
    dual = np.linalg.inv(lat.matrix).T
    return Lattice2(tuple(dual[0]), tuple(dual[1]))


def tube_lattice(t: TubeParam) -> Lattice2:
    """Period lattice of the conformal chart ``(s, psi)`` of the tube."""
    return Lattice2((t.length, 0.0), (0.0, t.period))


def tube_volume(t: TubeParam) -> float:
    return 4 * math.pi ** 2 * t.r / t.kappa


def tube_mean_curvature(t: TubeParam, phi):
    """Mean curvature ``(1 - 2 r k cos phi) / (2 r (1 - r k cos phi))``."""
    c = t.rk * np.cos(phi)
    return (1 - 2 * c) / (2 * t.r * (1 - c))


def tube_gauss_curvature(t: TubeParam, phi):
    """Gaussian curvature ``-k cos phi / (r (1 - r k cos phi))``."""
    c = np.cos(phi)
    return -t.kappa * c / (t.r * (1 - t.rk * c))


def shortest_vector_norm2(lat: Lattice2) -> float:
    """Squared length of the shortest nonzero lattice vector (Lagrange reduction)."""
    u = np.array(lat.v1)
    v = np.array(lat.v2)
    if u @ u > v @ v:
        u, v = v, u
    while True:
        mu = round(float(u @ v) / float(u @ u))
        v = v - mu * u
        if v @ v >= u @ u:
            return float(u @ u)
        u, v = v, u


@dataclass(frozen=True)
class ConformalFactorField:
    """Strictly positive conformal factor ``h`` with ``g = h^4 g0``.

    Three representations are supported:

    * ``radial``: ``h(x)`` on the stereographic chart ``x in [0, oo)`` of
      ``S^2`` (rotationally symmetric); ``dlog`` optionally gives
      ``d log h / dx``.
    * ``func`` with ``lattice``: ``h(x, y)`` on R^2, periodic under the
      lattice.
    * ``samples`` with ``lattice``: an ``(nx, ny)`` array of values at
      ``(i/nx) v1 + (j/ny) v2``, periodic, no repeated boundary.
    """

    func: Callable | None = None
    samples: np.ndarray | None = None
    lattice: Lattice2 | None = None
    dlog: Callable | None = None
    radial: bool = False

    def __post_init__(self):
        if (self.func is None) == (self.samples is None):
            raise ValueError("give exactly one of func or samples")
        if self.samples is not None:
            arr = np.asarray(self.samples, dtype=float)
            if arr.ndim != 2 or min(arr.shape) < 2:
                raise ValueError("samples must be a 2-d grid")
            if not np.all(np.isfinite(arr)) or not np.all(arr > 0):
                raise ValueError("conformal factor must be strictly positive")
            arr.setflags(write=False)
            object.__setattr__(self, "samples", arr)
        if not self.radial and self.lattice is None:
            raise ValueError("torus fields need a lattice")

    @classmethod
    def sphere(cls, h, dlog=None) -> "ConformalFactorField":
        return cls(func=h, dlog=dlog, radial=True)

    @classmethod
    def torus(cls, h, lattice: Lattice2) -> "ConformalFactorField":
        return cls(func=h, lattice=lattice)

    @classmethod
    def grid(cls, samples, lattice: Lattice2) -> "ConformalFactorField":
        return cls(samples=samples, lattice=lattice)

    @classmethod
    def constant(cls, c: float, lattice: Lattice2 | None = None) -> "ConformalFactorField":
        if lattice is None:
            return cls.sphere(lambda x: np.full_like(np.asarray(x, float), c),
                              dlog=lambda x: np.zeros_like(np.asarray(x, float)))
        return cls.torus(lambda x, y: np.full(np.broadcast(x, y).shape, float(c)), lattice)

    @property
    def is_grid(self) -> bool:
        return self.samples is not None

    def scaled(self, c: float) -> "ConformalFactorField":
        """The field ``c * h`` (a homothety of the metric by ``c^4``)."""
        if self.samples is not None:
            return ConformalFactorField(samples=c * self.samples, lattice=self.lattice)
        f = self.func
        if self.radial:
            return ConformalFactorField(func=lambda x: c * f(x), dlog=self.dlog, radial=True)
        return ConformalFactorField(func=lambda x, y: c * f(x, y), lattice=self.lattice)

    def sample(self, nx: int, ny: int | None = None) -> np.ndarray:
        """Values on the uniform ``(nx, ny)`` grid of the fundamental domain."""
        if self.radial:
            raise TypeError("radial sphere fields have no torus grid")
        if self.samples is not None:
            return self.samples
        ny = nx if ny is None else ny
        u = np.arange(nx) / nx
        v = np.arange(ny) / ny
        uu, vv = np.meshgrid(u, v, indexing="ij")
        m = self.lattice.matrix
        x = uu * m[0, 0] + vv * m[1, 0]
        y = uu * m[0, 1] + vv * m[1, 1]
        vals = np.asarray(self.func(x, y), dtype=float)
        vals = np.broadcast_to(vals, x.shape)
        if not np.all(np.isfinite(vals)) or not np.all(vals > 0):
            raise ValueError("conformal factor must be strictly positive")
        return vals


def read_grid_file(path, lattice: Lattice2) -> ConformalFactorField:
    """Load a grid file: ``nx ny`` then ``nx*ny`` positive values, row-major."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing 'nx ny' header")
    nx, ny = int(tokens[0]), int(tokens[1])
    values = [float(tok) for tok in tokens[2:]]
    if len(values) != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} values, found {len(values)}")
    return ConformalFactorField.grid(np.array(values).reshape(nx, ny), lattice)


def write_grid_file(path, samples) -> None:
    arr = np.asarray(samples, dtype=float)
    nx, ny = arr.shape
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{nx} {ny}\n")
        for row in arr:
            fh.write(" ".join(f"{val:.17g}" for val in row) + "\n")
