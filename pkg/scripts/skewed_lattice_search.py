"""Compare the flat-torus closed-form constant with enumeration on sheared lattices."""
import argparse
import math

import numpy as np

from diracbounds.geometry import Lattice2, SpinStructure
from diracbounds.spectrum import check_flat_constant


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--aspect", type=float, default=1.0)
    p.add_argument("--shears", type=int, default=21)
    args = p.parse_args()

    print(f"{'shear':>7} {'spin':>5} {'enum':>10} {'squared':>10} {'printed':>10}  flags")
    for shear in np.linspace(-0.5, 0.5, args.shears):
        lat = Lattice2((1.0, 0.0), (float(shear), args.aspect))
        for s in (SpinStructure(1, 0), SpinStructure(0, 1), SpinStructure(1, 1)):
            chk = check_flat_constant(lat, s)
            flags = []
            if chk.undercut_squared:
                flags.append("squared overestimates")
            if chk.undercut_printed:
                flags.append("printed overestimates")
            if chk.constant_printed < chk.brute_force * (1 - 1e-10):
                flags.append("printed UNDERestimates")
            printed = chk.constant_printed if math.isfinite(chk.constant_printed) else float("nan")
            print(f"{shear:7.3f} {str(s):>5} {chk.brute_force:10.5f} {chk.constant_squared:10.5f} "
                  f"{printed:10.5f}  {', '.join(flags)}")


if __name__ == "__main__":
    main()
