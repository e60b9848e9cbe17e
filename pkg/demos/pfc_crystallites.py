"""Polycrystal growth: three rotated crystallites meet at grain boundaries.

Seeds three small patches of hexagonal density waves at different
orientations in a supercooled bath and lets the crystal equation grow
them until they impinge.  Saves the density field at a few times.
Runs a couple of minutes at this resolution.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from etdflow import (
    AdaptiveParams,
    PeriodicGrid,
    PhaseFieldCrystal,
    crystallite_field,
    run_flow,
)

OUT = os.path.join(os.path.dirname(__file__), "out")


def main():
    side = 240.0
    grid = PeriodicGrid(256, side)
    model = PhaseFieldCrystal(grid, sigma=1.0, delta=0.25, s=0.25, theta=1e4)
    X, Y = grid.nodes()
    phi0 = crystallite_field(
        X, Y,
        centers=[[60.0, 120.0], [120.0, 120.0], [180.0, 120.0]],
        angles=[-np.pi / 4.0, 0.0, np.pi / 4.0],
        domain=(0.0, side),
    )

    frames = {}
    run_flow(
        model, phi0, t_end=20.0, order=2,
        adaptive=AdaptiveParams(dt_min=0.02, dt_max=1.0, gamma_adp=10.0),
        picard_tol=1e-8,
        snapshot_times=[0.0, 10.0, 20.0],
        snapshot_callback=lambda t, phi: frames.__setitem__(round(t, 6), phi.copy()),
    )

    os.makedirs(OUT, exist_ok=True)
    fig, axes = plt.subplots(1, 3, figsize=(12, 4.2))
    for ax, t in zip(axes, sorted(frames)):
        ax.imshow(frames[t].T, origin="lower", cmap="magma",
                  extent=[0, side, 0, side])
        ax.set_title(f"t = {t:g}")
        ax.set_xticks([])
        ax.set_yticks([])
    fig.tight_layout()
    path = os.path.join(OUT, "pfc_crystallites.png")
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
