"""Where Phi(xi, p, nu) dips below c1 * nu when c1 is taken from p = kappa alone.

Prints, per kappa, the one-endpoint and two-endpoint constants and the worst
grid point for each.
"""
import sys

import numpy as np

from anticonc.halasz import _phi_array, convexity_constant, default_nu_grid


def main():
    nus = np.array(default_nu_grid())
    print("kappa,c1_one_endpoint,c1_two_endpoint,min_gap_one,argmin_xi,argmin_p,argmin_nu,min_gap_two")
    for kappa in (0.05, 0.1, 0.2, 0.3):
        c_one = float((_phi_array(0.5, kappa, nus) / nus).min())
        c_two = convexity_constant(kappa, nus)
        xi, p, nu = np.meshgrid(np.linspace(0, 0.5, 51), np.linspace(kappa, 1 - kappa, 51), nus,
                                indexing="ij")
        phi = _phi_array(xi, p, nu)
        gap_one = phi - c_one * nu
        i = np.unravel_index(np.argmin(gap_one), gap_one.shape)
        gap_two = float((phi - c_two * nu).min())
        print(f"{kappa},{c_one:.6g},{c_two:.6g},{gap_one[i]:.3e},{xi[i]:.3g},{p[i]:.3g},{nu[i]:.3g},"
              f"{gap_two:.3e}", file=sys.stdout)


if __name__ == "__main__":
    main()
