"""Regenerate the five comparison datasets (CSV + SVG) and print a short summary."""
import argparse
import math
import time
from pathlib import Path

from diracbounds.sweep import emit_csv, emit_svg, figure_specs, run_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="figures")
    p.add_argument("--points", type=int, default=19)
    p.add_argument("--tol", type=float, default=1e-9)
    args = p.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, spec in figure_specs(args.tol, args.points).items():
        start = time.perf_counter()
        curve = run_sweep(spec)
        emit_csv(curve, outdir / f"{name}.csv")
        emit_svg(curve, outdir / f"{name}.svg")
        print(f"{name}: {len(curve)} points in {time.perf_counter() - start:.2f}s")
        for label in curve.labels:
            vals = [v for v in curve.values[label] if math.isfinite(v)]
            print(f"  {label:<14} min {min(vals):10.5g}  max {max(vals):10.5g}")
        for i, label, msg in curve.failures:
            print(f"  failed at {curve.params[i]:g} ({label}): {msg}")


if __name__ == "__main__":
    main()
