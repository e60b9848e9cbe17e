"""Temporal self-convergence of the first- and second-order schemes.

Halves the step size four times on a short Allen-Cahn run and compares
each final field against a finer reference.  The observed orders settle
near 1 and 2.  Takes roughly half a minute on a laptop.
"""

import numpy as np

from etdflow import AllenCahn, PeriodicGrid, analytic_profile, self_convergence


def main():
    grid = PeriodicGrid(32, 2.0 * np.pi)
    model = AllenCahn(grid, eps_sq=0.04, s=2.0, theta=10.0)
    X, Y = grid.nodes()
    phi0 = analytic_profile("ac_waves", X, Y)

    taus = [0.1 * 0.5 ** k for k in range(4)]
    # order here is the index r; the scheme itself has order r + 1.
    for order in (0, 1):
        res = self_convergence(model, phi0, t_end=0.5, taus=taus, order=order,
                               ref_dt=1e-3, ref_order=2, picard_tol=1e-10,
                               ref_picard_tol=1e-12)
        print(f"order-{order + 1} scheme:")
        print(f"  {'tau':>8}  {'|err|_inf (phi)':>16}  {'rate':>6}")
        for i, tau in enumerate(res.taus):
            rate = "" if i == 0 else f"{res.pairwise_phi[i - 1]:6.2f}"
            print(f"  {tau:8.4f}  {res.phi_errors[i]:16.3e}  {rate:>6}")
        print(f"  least-squares slope: {res.slope_phi:.2f} (phi), "
              f"{res.slope_r:.2f} (R)\n")


if __name__ == "__main__":
    main()
