"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical nonconvergence, 4 I/O.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bounds as B
from .geometry import Lattice2, SpinStructure, read_grid_file
from .optimize import optimize_beta
from .quadrature import DEFAULT_TOL, QuadratureError
from .spectrum import check_flat_constant, flat_spectrum
from .sweep import (
    BoundCurve,
    Family,
    SeriesRequest,
    SweepSpec,
    emit_csv,
    emit_svg,
    figure_specs,
    parse_grid,
    run_sweep,
    torus_cosine_field,
)
from .uniformization import RootBracketError

EXIT_OK, EXIT_SPEC, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

ELLIPSOID_DEFAULT = "LOWER_LB,UPPER_H2,UPPER_T1_BETA1_CLOSED,UPPER_T2"
TUBE_DEFAULT = "TUBE_STAR,TUBE_DSTAR,TUBE_H2"


class NonConvergence(RuntimeError):
    pass


def _print_curve(curve: BoundCurve, out=None):
    out = out or sys.stdout
    width = max([len(label) for label in curve.labels] + [5])
    for i, p in enumerate(curve.params):
        print(f"param = {p:.10g}", file=out)
        for label in curve.labels:
            v, e = curve.values[label][i], curve.errors[label][i]
            print(f"  {label:<{width}}  {v:.12g}  (+- {e:.2g})", file=out)
    for i, label, msg in curve.failures:
        print(f"  failed: param={curve.params[i]:.10g} {label}: {msg}", file=sys.stderr)


def _emit(curve: BoundCurve, args):
    if args.csv:
        emit_csv(curve, args.csv)
    if args.svg:
        emit_svg(curve, args.svg)


def _series(kinds: str, betas) -> tuple[SeriesRequest, ...]:
    out = [SeriesRequest.parse(k) for k in kinds.split(",") if k.strip()]
    out += [SeriesRequest(B.BoundKind.UPPER_T1, b) for b in betas or ()]
    return tuple(out)


def _finish(curve: BoundCurve, args) -> int:
    _print_curve(curve)
    _emit(curve, args)
    if curve.failures:
        raise NonConvergence(f"{len(curve.failures)} grid point(s) failed")
    return EXIT_OK


def cmd_ellipsoid(args) -> int:
    grid = (args.a,) if args.a is not None else parse_grid(args.grid)
    spec = SweepSpec(Family.ELLIPSOID, grid, _series(args.kinds, args.beta),
                     tol=args.tol, normalized=args.normalized)
    return _finish(run_sweep(spec), args)


def cmd_tube(args) -> int:
    if args.r is not None:
        grid = (args.r * args.kappa,)
    else:
        grid = parse_grid(args.grid)
    spin = SpinStructure.parse(args.spin)
    if spin.trivial:
        kinds = "TUBE_TRIVIAL"
    elif args.kinds is not None:
        kinds = args.kinds
    else:
        kinds = TUBE_DEFAULT if spin == SpinStructure(1, 1) else "TUBE_STAR,TUBE_DSTAR"
    spec = SweepSpec(Family.TUBE, grid, _series(kinds, None), spin=spin, tol=args.tol,
                     normalized=args.normalized, pi2_units=args.pi2_units, kappa=args.kappa,
                     trivial_factor=args.factor)
    return _finish(run_sweep(spec), args)


def cmd_torus(args) -> int:
    lattice = Lattice2.parse(args.lattice)
    spin = SpinStructure.parse(args.spin)
    if args.hgrid:
        h = read_grid_file(args.hgrid, lattice)
    else:
        h = torus_cosine_field(lattice, args.amplitude)
    results = []
    if spin.trivial:
        results.append(B.torus_trivial_bound(h, lattice, args.tol))
    else:
        results.append(B.torus_spin_bound_ratio(h, lattice, spin, args.tol, args.normalized))
        results.append(B.torus_spin_bound_gradient(h, lattice, spin, args.tol, args.normalized,
                                                   form=args.form))
        results.append(B.torus_curvature_bound(h, lattice, spin, args.tol, args.normalized,
                                               form=args.form))
    for bv in results:
        unit = "lambda_1^2 vol" if bv.normalized else "lambda_1^2"
        print(f"{bv.kind.value:<16} {unit} <= {bv.value:.12g}  (+- {bv.error:.2g})")
        if bv.details.get("converged") is False:
            raise NonConvergence(f"{bv.kind.value}: grid refinement did not settle")
    grad = next((bv for bv in results if bv.kind is B.BoundKind.UPPER_T4_DSTAR), None)
    if grad is not None:
        print(f"flat constant: squared form {grad.details['constant_squared']:.12g}, "
              f"printed form {grad.details['constant_printed']:.12g}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    res = optimize_beta(args.a, args.lo, args.hi, args.tol)
    print(f"beta* = {res.beta_star:.10g}")
    print(f"bound = {res.value:.12g}")
    print(f"iterations = {res.iterations}, bracket = [{res.bracket[0]:g}, {res.bracket[1]:g}]")
    if res.at_boundary:
        print("minimiser sits at the bracket end")
    if res.multimodal:
        print("warning: sub-brackets disagree; objective may be multimodal")
    if not res.converged:
        raise NonConvergence("golden-section search hit its iteration cap")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    lattice = Lattice2.parse(args.lattice)
    spin = SpinStructure.parse(args.spin)
    sl = flat_spectrum(lattice, spin, args.count)
    print(" ".join(f"{v:.12g}" for v in sl.eigenvalue_squares))
    print(f"kernel dimension: {sl.kernel_dimension()}")
    if not spin.trivial:
        chk = check_flat_constant(lattice, spin)
        print(f"lambda_1^2 vol (enumeration) = {chk.brute_force:.12g}")
        print(f"closed form, squared = {chk.constant_squared:.12g}, printed = {chk.constant_printed:.12g}")
    return EXIT_OK


def cmd_figures(args) -> int:
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {outdir}: {exc.strerror}") from exc
    failed = 0
    for name, spec in figure_specs(tol=args.tol, points=args.points).items():
        curve = run_sweep(spec)
        emit_csv(curve, outdir / f"{name}.csv")
        if args.svg:
            emit_svg(curve, outdir / f"{name}.svg")
        failed += len(curve.failures)
        print(f"wrote {outdir / (name + '.csv')} ({len(curve)} rows)")
    if failed:
        raise NonConvergence(f"{failed} figure point(s) failed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diracbounds",
                                description="Eigenvalue bounds for the squared Dirac operator on surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=True):
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="quadrature tolerance")
        if grid:
            sp.add_argument("--grid", help="lo:hi:n or comma list of parameters")
        sp.add_argument("--csv", help="write the sweep as CSV")
        sp.add_argument("--svg", help="write the sweep as SVG")
        sp.add_argument("--normalized", action="store_true", help="report lambda_1^2 * vol")

    e = sub.add_parser("ellipsoid", help="bounds on the ellipsoid E(a)")
    common(e)
    e.add_argument("--a", type=float, help="single ellipsoid parameter")
    e.add_argument("--beta", type=float, action="append",
                   help="add the Delta^beta test-function bound (repeatable)")
    e.add_argument("--kinds", default=ELLIPSOID_DEFAULT, help="comma list of bound kinds")
    e.set_defaults(func=cmd_ellipsoid)

    t = sub.add_parser("tube", help="bounds on the tube around a circle")
    common(t)
    t.add_argument("--kappa", type=float, default=1.0)
    t.add_argument("--r", type=float, help="single tube radius (else --grid over r*kappa)")
    t.add_argument("--spin", default="1,1", help="e1,e2")
    t.add_argument("--kinds", help="comma list of bound kinds")
    t.add_argument("--pi2-units", action="store_true", help="divide values by pi^2")
    t.add_argument("--factor", choices=("printed", "lattice"), default="printed",
                   help="prefactor of the trivial-structure bound")
    t.set_defaults(func=cmd_tube)

    r = sub.add_parser("torus", help="conformally flat torus h^4 g0")
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--lattice", required=True, help="x1,y1,x2,y2")
    r.add_argument("--spin", default="1,0")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--hgrid", help="grid file: 'nx ny' then nx*ny values")
    src.add_argument("--amplitude", type=float, default=0.0, help="h = 1 + c cos(2 pi u)")
    r.add_argument("--form", choices=("squared", "printed"), default="squared",
                   help="flat constant variant")
    r.add_argument("--normalized", action="store_true")
    r.set_defaults(func=cmd_torus)

    o = sub.add_parser("optimize-beta", help="best exponent in the Delta^beta family")
    o.add_argument("--a", type=float, required=True)
    o.add_argument("--lo", type=float, default=0.51)
    o.add_argument("--hi", type=float, default=20.0)
    o.add_argument("--tol", type=float, default=1e-6)
    o.set_defaults(func=cmd_optimize)

    s = sub.add_parser("spectrum", help="flat torus spectrum by enumeration")
    s.add_argument("--lattice", required=True)
    s.add_argument("--spin", default="0,0")
    s.add_argument("--count", type=int, default=10)
    s.set_defaults(func=cmd_spectrum)

    f = sub.add_parser("figures", help="regenerate the five comparison datasets")
    f.add_argument("--outdir", default="figures")
    f.add_argument("--tol", type=float, default=1e-9)
    f.add_argument("--points", type=int, default=19)
    f.add_argument("--svg", action="store_true", help="also write SVG charts")
    f.set_defaults(func=cmd_figures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QuadratureError, RootBracketError, NonConvergence) as exc:
        print(f"error: numerical nonconvergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
