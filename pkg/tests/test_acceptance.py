"""The ten acceptance criteria, each at its stated tolerance.

Every test records its individual checks through the ``criterion`` fixture,
which prints a PASS/FAIL line per criterion after the run, then asserts.
"""
import math
import time

import numpy as np

from diracbounds import bounds as B
from diracbounds.cli import main
from diracbounds.geometry import (
    ConformalFactorField,
    Lattice2,
    SpinStructure,
    TubeParam,
    dual_lattice,
    ellipsoid_volume,
    shortest_vector_norm2,
    tube_lattice,
)
from diracbounds.optimize import optimize_beta
from diracbounds.spectrum import flat_lambda1_squared, flat_spectrum
from diracbounds.uniformization import i1, solve_profile

PI2 = math.pi ** 2


def close(label, value, target, tol, rel=False):
    err = abs(value - target) / (abs(target) if rel else 1.0)
    return label, err <= tol, f"got {value:.10g}, want {target:.10g}, {'rel' if rel else 'abs'} err {err:.2g} > {tol:g}"


def below(label, value, limit):
    return label, value <= limit, f"{value:.10g} > {limit:.10g}"


def test_criterion_01_round_sphere(criterion):
    start = time.perf_counter()
    checks = [close("lower bound", B.lower_bound_genus0(ellipsoid_volume(1.0)).value, 1.0, 1e-12)]
    for beta in (0.75, 1.0, 2.0):
        checks.append(close(f"beta={beta}", B.ellipsoid_beta_bound(1.0, beta).value, 1.0, 1e-8))
    checks.append(close("intrinsic", B.ellipsoid_intrinsic_bound(1.0).value, 1.0, 1e-6))
    checks.append(below("I1(1)", i1(1.0), 1e-8))
    elapsed = time.perf_counter() - start
    checks.append(below("runtime s", elapsed, 1.0))
    assert criterion(1, "round-sphere exactness", checks)


def test_criterion_02_closed_form_vs_quadrature(criterion):
    start = time.perf_counter()
    grid = [round(0.1 * k, 1) for k in range(1, 10)] + [round(1 + 0.1 * k, 1) for k in range(1, 41)]
    worst = max(abs(B.ellipsoid_beta1_closed_form(a).value - B.ellipsoid_beta_bound(a, 1.0).value)
                for a in grid)
    elapsed = time.perf_counter() - start
    checks = [below("max |closed - quadrature|", worst, 1e-6), below("runtime s", elapsed, 5.0)]
    assert criterion(2, "beta=1 closed form vs quadrature", checks)


def test_criterion_03_small_a_limits(criterion):
    opt = optimize_beta(1e-3)
    checks = [
        close("beta=1 at a=1e-3", B.ellipsoid_beta_bound(1e-3, 1.0).value, 6.0, 0.02, rel=True),
        close("optimal value", opt.value, 3 + 2 * math.sqrt(2), 0.02, rel=True),
        close("optimal beta", opt.beta_star, 0.5 + 1 / math.sqrt(2), 0.05),
        close("intrinsic at a=1e-2", B.ellipsoid_intrinsic_bound(1e-2).value,
              1.5 + math.log(2), 0.05, rel=True),
    ]
    assert criterion(3, "small-a limits", checks)


def test_criterion_04_large_a_limits(criterion):
    lim20 = B.beta_limit_large_a(20.0)
    target = 1.1 * (2 * math.log(2) + 3) / (100 * math.pi)
    lower = [B.lower_bound_genus0(ellipsoid_volume(a)).value for a in (10.0, 100.0, 1e3, 1e4)]
    checks = [
        close("beta=1 at a=1e3", B.ellipsoid_beta_bound(1e3, 1.0).value, 0.3, 0.02, rel=True),
        ("large-a limit at beta=20", 0.25 < lim20 < 0.26, f"{lim20:.10g} outside (0.25, 0.26)"),
        below("intrinsic at a=100", B.ellipsoid_intrinsic_bound(100.0).value, target),
        ("lower bound decreasing to 0", all(np.diff(lower) < 0) and lower[-1] < 1e-3,
         f"values {lower}"),
    ]
    assert criterion(4, "large-a limits", checks)


def test_criterion_05_tube_identities(criterion):
    checks = []
    for a in np.round(np.arange(0.1, 1.0, 0.1), 1):
        checks.append(close(f"ratio rk={a}", B.tube_ratio_quadrature(a), (1 - a * a) ** -1.5, 1e-10))
    for rk in (0.1, 0.5, 0.9):
        for kappa in (0.5, 1.0, 3.0):
            t = TubeParam(kappa, rk / kappa)
            checks.append(close(f"energy rk={rk} kappa={kappa}", B.tube_gradient_energy(t),
                                PI2 / rk * (1 - math.sqrt(1 - rk * rk)), 1e-8))
            checks.append(close(f"int H^2 rk={rk} kappa={kappa}", B.tube_h2_integral(t),
                                PI2 / (rk * math.sqrt(1 - rk * rk)), 1e-8))
    assert criterion(5, "tube identities", checks)


def test_criterion_06_tube_bound_behavior(criterion):
    s10, s01, s11 = SpinStructure(1, 0), SpinStructure(0, 1), SpinStructure(1, 1)
    thin = TubeParam(1.0, 1e-3)
    checks = [
        below("s=(1,0) (*) at rk=1e-3", B.tube_bound_star(thin, s10).value, 1e-2 * PI2),
        below("s=(1,0) (**) at rk=1e-3", B.tube_bound_dstar(thin, s10).value, 1e-2 * PI2),
    ]
    for rk in (0.1, 0.5, 0.9):
        t = TubeParam(1.0, rk)
        checks.append(close(f"s=(0,1) (**) rk={rk}", B.tube_bound_dstar(t, s01).value, PI2 / rk, 1e-12,
                            rel=True))
    checks.append(below("s=(0,1) (**) rk=0.999", B.tube_bound_dstar(TubeParam(1.0, 0.999), s01).value,
                        PI2 / 0.999 * (1 + 1e-14)))
    for rk in np.linspace(0.01, 0.99, 99):
        t = TubeParam(1.0, float(rk))
        h2 = B.tube_bound_h2(t).value
        best = min(B.tube_bound_star(t, s11).value, B.tube_bound_dstar(t, s11).value)
        checks.append(below(f"s=(1,1) rk={rk:.2f}", h2, best))
    assert criterion(6, "tube bound behavior", checks)


def test_criterion_07_uniformization(criterion):
    xs = np.linspace(0.02, 1.0, 50)
    w1 = solve_profile(1.0).w(xs)
    checks = [below("a=1 stereographic", float(np.max(np.abs(w1 - (1 - xs ** 2) / (1 + xs ** 2)))), 1e-8)]
    for a in (0.2, 0.5, 2.0, 5.0):
        sol = solve_profile(a)
        w = sol.w(xs)
        checks.append(below(f"symmetry a={a}", float(np.max(np.abs(w + sol.w(1 / xs)))), 1e-8))
        stereo = (1 - xs ** 2) / (1 + xs ** 2)
        if a < 1:
            lo, hi = stereo, np.sqrt(1 - xs ** (2 / math.sqrt(1 - a * a)))
        else:
            y = xs ** (2 / a)
            lo, hi = (1 - y) / (1 + y), stereo
        ok = bool(np.all(lo <= w + 1e-12) and np.all(w <= hi + 1e-12))
        checks.append((f"brackets a={a}", ok, "profile leaves its bracket"))
        inner = np.linspace(0.05, 0.95, 100)
        step = 1e-5 * inner
        dw = (sol.w(inner + step) - sol.w(inner - step)) / (2 * step)
        wi = sol.w(inner)
        resid = np.sqrt((1 - a * a) * wi ** 2 + a * a) * dw / (1 - wi ** 2) + 1 / inner
        checks.append(below(f"ODE residual a={a}", float(np.max(np.abs(resid))), 1e-6))
    assert criterion(7, "uniformization solver", checks)


def _torus_fields():
    sq = Lattice2.rectangular(1.0, 1.0)
    skew = Lattice2((1.0, 0.0), (0.3, 1.2))
    d = dual_lattice(skew).matrix

    def uv(x, y):
        return 2 * math.pi * (d[0, 0] * x + d[0, 1] * y), 2 * math.pi * (d[1, 0] * x + d[1, 1] * y)

    tube = TubeParam(1.0, 0.5)
    return [
        ("1+0.2cos", sq, ConformalFactorField.torus(lambda x, y: 1 + 0.2 * np.cos(2 * math.pi * x), sq)),
        ("exp(0.3 sin u cos v) skew", skew,
         ConformalFactorField.torus(lambda x, y: np.exp(0.3 * np.sin(uv(x, y)[0]) * np.cos(uv(x, y)[1])), skew)),
        ("tube rk=0.5", tube_lattice(tube), B.tube_conformal_field(tube)),
    ]


def test_criterion_08_torus_oracle(criterion):
    checks = []
    for lat in (Lattice2.rectangular(1.0, 1.0), Lattice2((1.0, 0.0), (0.4, 0.7)), Lattice2.rectangular(3.0, 0.5)):
        dim = flat_spectrum(lat, SpinStructure(0, 0), 8).kernel_dimension()
        checks.append((f"kernel {lat.v2}", dim == 2, f"dimension {dim}"))
    for w, h in ((1.0, 1.0), (1.0, 2.5), (3.0, 0.4)):
        lat = Lattice2.rectangular(w, h)
        for s in (SpinStructure(1, 0), SpinStructure(0, 1), SpinStructure(1, 1)):
            brute = flat_lambda1_squared(lat, s) * lat.area
            checks.append(close(f"rect {w}x{h} s={s}", brute, B.flat_torus_constant(lat, s), 1e-10, rel=True))
    for lat in (Lattice2.rectangular(1.0, 1.0), Lattice2((1.0, 0.0), (0.4, 0.7))):
        h1 = ConformalFactorField.constant(1.0, lat)
        target = 4 * PI2 * shortest_vector_norm2(dual_lattice(lat))
        checks.append(close(f"trivial h=1 {lat.v2}", B.torus_trivial_bound(h1, lat).value, target, 1e-10,
                            rel=True))
    s = SpinStructure(1, 0)
    for name, lat, h in _torus_fields():
        curv = B.torus_curvature_bound(h, lat, s, normalized=True).value
        grad = B.torus_spin_bound_gradient(h, lat, s, normalized=True).value
        checks.append(close(f"curvature vs gradient {name}", curv, grad, 1e-7))
    assert criterion(8, "torus oracle", checks)


def test_criterion_09_global_ordering(criterion):
    rng = np.random.default_rng(20261016)
    params = np.exp(rng.uniform(math.log(0.02), math.log(50.0), 50))
    checks = []
    for a in params:
        bad = B.check_genus0_ordering(B.ellipsoid_bounds(float(a), betas=(0.75, 1.0, 2.0)))
        checks.append((f"a={a:.4g}", not bad, f"below 4pi/vol: {bad}"))
    assert criterion(9, "global ordering over 50 ellipsoids", checks)


def test_criterion_10_figure_regeneration(criterion, tmp_path, capsys):
    start = time.perf_counter()
    runs = []
    for name in ("first", "second"):
        out = tmp_path / name
        code = main(["figures", "--outdir", str(out)])
        runs.append((code, {p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))}))
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    (c1, f1), (c2, f2) = runs
    checks = [
        ("exit codes", c1 == 0 and c2 == 0, f"{c1}, {c2}"),
        ("five datasets", len(f1) == 5, f"{len(f1)} files"),
        ("byte-identical", f1 == f2, "runs differ"),
        below("runtime s", elapsed, 60.0),
    ]
    assert criterion(10, "figure regeneration", checks)
