"""Tabulate the genus-zero bounds of E(a) towards both degenerate ends.

Also shows how the uniformization energy I_1(a) grows for prolate
ellipsoids, and compares the two ways of bounding I_1 from above.
"""
import math

import numpy as np

from diracbounds import bounds as B
from diracbounds.geometry import delta_a, ellipsoid_volume
from diracbounds.optimize import optimize_beta
from diracbounds.quadrature import integrate_adaptive
from diracbounds.uniformization import i1, solve_profile

PI2 = math.pi ** 2


def table():
    print(f"{'a':>8} {'4pi/vol':>10} {'H^2':>10} {'beta=1':>10} {'best beta':>10} {'beta*':>7} {'intrinsic':>10}")
    for a in (1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e3):
        bd = B.ellipsoid_bounds(a)
        opt = optimize_beta(a)
        print(f"{a:8.3g} {bd['LOWER_LB'].value:10.5g} {bd['UPPER_H2'].value:10.5g} "
              f"{bd['UPPER_T1(beta=1)'].value:10.5g} {opt.value:10.5g} {opt.beta_star:7.4f} "
              f"{bd['UPPER_T2'].value:10.5g}")
    print(f"small-a references: beta=1 -> 6, best -> {3 + 2 * math.sqrt(2):.5f}, "
          f"intrinsic -> {1.5 + math.log(2):.5f}")
    print(f"large-a references: beta=1 -> 0.3, beta=20 limit -> {B.beta_limit_large_a(20.0):.5f}")


def i1_growth():
    print("\nI_1(a) against pi^2 a / 2 and the intrinsic bound against (2 ln 2 + 3)/(pi a):")
    for a in (2.0, 5.0, 10.0, 30.0, 100.0, 300.0):
        val = i1(a)
        vol = ellipsoid_volume(a)
        print(f"  a={a:6g}  I1={val:11.5f}  I1/(pi^2 a/2)={val / (PI2 * a / 2):.4f}  "
              f"bound={(4 * math.pi + val) / vol:.5f}  target={(2 * math.log(2) + 3) / (math.pi * a):.5f}")


def i1_estimates(a):
    sol = solve_profile(a)

    def gap(x):
        w = sol.w(x)
        return w / np.sqrt(delta_a(a, w)) - 1

    def on_unit(f):
        return 4 * math.pi * integrate_adaptive(f, 0.0, 1.0, 1e-10).value

    first = on_unit(lambda x: x ** 3 / (1 + x * x) ** 2)
    cross_printed = on_unit(lambda x: gap(x) * x)
    cross = on_unit(lambda x: gap(x) * x / (1 + x * x))
    s = math.sqrt(a * a - 1)
    tail_printed = 0.5 * math.pi * a * a / s * math.log(
        (8 * a ** 3 - 6 * a * a + 2 * a * s) / (8 * a ** 3 - 6 * a * a - 2 * a * s))
    tail = math.pi * a * a * math.acosh(a) / s
    print(f"  a={a:5g}  I1={i1(a):9.4f}  printed estimate={first + cross_printed + tail_printed:9.4f}  "
          f"re-derived={first + cross + tail:9.4f}")


if __name__ == "__main__":
    table()
    i1_growth()
    print("\nupper estimates for I_1 (a > 1):")
    for a in (1.5, 4.0, 20.0):
        i1_estimates(a)
