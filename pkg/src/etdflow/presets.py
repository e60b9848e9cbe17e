"""Named experiment presets.

Each entry is a complete raw configuration mapping (the same shape a YAML
config file parses to) for one of the standard experiments: temporal
convergence ladders for the four models, Cahn-Hilliard coarsening, thin
film growth, and polycrystal growth.  Every experiment comes in two
sizes: the full-scale setup and a reduced ``-desk`` variant (smaller
grid, shorter horizon) sized for laptops and CI.

Block centers for the polycrystal layout are not pinned down by the
usual problem statement beyond "three blocks of side 40"; the presets
place them evenly spaced on the domain's horizontal midline.
"""

from __future__ import annotations

import copy

import numpy as np

TWO_PI = 2.0 * np.pi

_LADDER_01 = [0.1 * 0.5**k for k in range(5)]
_LADDER_001 = [0.01 * 0.5**k for k in range(5)]
_LADDER_002 = [0.02 * 0.5**k for k in range(5)]

# Order studies use a tight Picard tolerance and a subdivided starting
# step so the measured slopes are not polluted by iteration error or
# startup error.  The iteration cap is generous because the largest
# ladder steps converge slowly (hundreds of sweeps on the conserved
# flows) while remaining well inside the contraction region.
_STUDY_SCHEME = {"order": 2, "picard_tol": 1e-10, "max_picard": 1000,
                 "bootstrap_substeps": 10}


def _ac_convergence(modes, t_end, ref_dt):
    return {
        "model": {"kind": "ac", "eps_sq": 0.01, "s": 2.0, "theta": 10.0},
        "backend": {"modes": modes, "domain": [0.0, TWO_PI]},
        "time": {"t_end": t_end, "dt": _LADDER_01[0]},
        "scheme": dict(_STUDY_SCHEME),
        "initial": {"type": "profile", "name": "ac_waves"},
        "convergence": {"taus": list(_LADDER_01), "ref_dt": ref_dt, "ref_order": 3,
                        "ref_picard_tol": 1e-12},
    }


def _ch_convergence(modes, t_end, ref_dt):
    return {
        "model": {"kind": "ch", "eps_sq": 2.5e-3, "s": 2.0, "theta": 10.0},
        "backend": {"modes": modes, "domain": [-1.0, 1.0]},
        "time": {"t_end": t_end, "dt": _LADDER_001[0]},
        "scheme": dict(_STUDY_SCHEME),
        "initial": {"type": "profile", "name": "ch_cosines"},
        "convergence": {"taus": list(_LADDER_001), "ref_dt": ref_dt, "ref_order": 3,
                        "ref_picard_tol": 1e-12},
    }


def _mbe_convergence(kind, s, modes, t_end, ref_dt):
    return {
        "model": {"kind": kind, "eps_sq": 0.01, "s": s, "theta": 1e4},
        "backend": {"modes": modes, "domain": [0.0, TWO_PI]},
        "time": {"t_end": t_end, "dt": _LADDER_002[0]},
        "scheme": dict(_STUDY_SCHEME),
        "initial": {"type": "profile", "name": "mbe_sines"},
        "convergence": {"taus": list(_LADDER_002), "ref_dt": ref_dt, "ref_order": 3,
                        "ref_picard_tol": 1e-12},
    }


def _pfc_convergence(modes, t_end, ref_dt):
    return {
        "model": {"kind": "pfc", "sigma": 1.0, "delta": 0.025, "s": 0.025,
                  "theta": 1e4},
        "backend": {"modes": modes, "domain": [0.0, 32.0]},
        "time": {"t_end": t_end, "dt": _LADDER_001[0]},
        "scheme": dict(_STUDY_SCHEME),
        "initial": {"type": "profile", "name": "pfc_stripe"},
        "convergence": {"taus": list(_LADDER_001), "ref_dt": ref_dt, "ref_order": 3,
                        "ref_picard_tol": 1e-12},
    }


def _ch_coarsening(eps_sq, side, modes, t_end, snapshots):
    return {
        "model": {"kind": "ch_periodic", "eps_sq": eps_sq, "s": 2.0, "theta": 1e4},
        "backend": {"modes": modes, "domain": [0.0, side]},
        "time": {
            "t_end": t_end,
            "adaptive": {"dt_min": 1e-4, "dt_max": 0.1, "gamma_adp": 1e5},
        },
        "scheme": {"order": 3},
        "initial": {"type": "random", "amplitude": 0.05},
        "seed": 2024,
        "output": {"snapshot_times": snapshots},
    }


def _mbe_film(kind, s, modes, t_end, snapshots):
    return {
        "model": {"kind": kind, "eps_sq": 0.03**2, "s": s, "theta": 1e4},
        "backend": {"modes": modes, "domain": [0.0, TWO_PI]},
        "time": {
            "t_end": t_end,
            "adaptive": {"dt_min": 1e-5, "dt_max": 1e-2, "gamma_adp": 100.0},
        },
        "scheme": {"order": 3},
        "initial": {"type": "random", "amplitude": 0.001},
        "seed": 2024,
        "output": {"snapshot_times": snapshots},
    }


def _pfc_crystallites(side, modes, centers, t_end, snapshots):
    return {
        "model": {"kind": "pfc", "sigma": 1.0, "delta": 0.25, "s": 0.25,
                  "theta": 1e4},
        "backend": {"modes": modes, "domain": [0.0, side]},
        "time": {
            "t_end": t_end,
            "adaptive": {"dt_min": 0.02, "dt_max": 1.0, "gamma_adp": 10.0},
        },
        "scheme": {"order": 3},
        "initial": {
            "type": "crystallites",
            "centers": centers,
            "angles": [-np.pi / 4.0, 0.0, np.pi / 4.0],
        },
        "output": {"snapshot_times": snapshots},
    }


_PRESETS = {
    "ac-convergence": (
        "Allen-Cahn temporal order ladder, 128^2 modes, T=1",
        _ac_convergence(128, 1.0, 1e-5),
    ),
    "ac-convergence-desk": (
        "Allen-Cahn order ladder at desk scale, 64^2 modes, T=0.5",
        _ac_convergence(64, 0.5, 1e-4),
    ),
    "ch-convergence": (
        "Cahn-Hilliard (Neumann, Legendre) order ladder, N=256, T=1",
        _ch_convergence(256, 1.0, 1e-5),
    ),
    "ch-convergence-desk": (
        "Cahn-Hilliard (Neumann) order ladder at desk scale, N=64, T=1",
        _ch_convergence(64, 1.0, 1e-4),
    ),
    "mbe-slope-convergence": (
        "MBE with slope selection order ladder, 128^2 modes, T=1",
        _mbe_convergence("mbe_slope", 2.0, 128, 1.0, 1e-5),
    ),
    "mbe-slope-convergence-desk": (
        "MBE with slope selection order ladder at desk scale, 64^2, T=0.5",
        _mbe_convergence("mbe_slope", 2.0, 64, 0.5, 1e-4),
    ),
    "mbe-noslope-convergence": (
        "MBE without slope selection order ladder, 128^2 modes, T=1",
        _mbe_convergence("mbe_noslope", 0.125, 128, 1.0, 1e-5),
    ),
    "mbe-noslope-convergence-desk": (
        "MBE without slope selection order ladder at desk scale, 64^2, T=0.5",
        _mbe_convergence("mbe_noslope", 0.125, 64, 0.5, 1e-4),
    ),
    "pfc-convergence": (
        "Phase-field crystal order ladder, 256^2 modes, T=1",
        _pfc_convergence(256, 1.0, 1e-5),
    ),
    "pfc-convergence-desk": (
        "Phase-field crystal order ladder at desk scale, 128^2 modes, T=1",
        _pfc_convergence(128, 1.0, 1e-4),
    ),
    "ch-coarsening": (
        "Cahn-Hilliard coarsening, adaptive steps, 128^2 modes, T=200",
        _ch_coarsening(0.01, TWO_PI, 128, 200.0, [0.1, 10.0, 20.0, 100.0, 200.0]),
    ),
    "ch-coarsening-desk": (
        "Cahn-Hilliard coarsening at desk scale (small box, wide interface), T=20",
        _ch_coarsening(0.05, np.pi, 32, 20.0, [0.1, 10.0, 20.0]),
    ),
    "mbe-slope-film": (
        "Thin film growth with slope selection, adaptive steps, T=500",
        _mbe_film("mbe_slope", 2.0, 128, 500.0, [1.0, 50.0, 100.0, 500.0]),
    ),
    "mbe-slope-film-desk": (
        "Thin film growth with slope selection at desk scale, T=10",
        _mbe_film("mbe_slope", 2.0, 64, 10.0, [1.0, 10.0]),
    ),
    "mbe-noslope-film": (
        "Thin film growth without slope selection, adaptive steps, T=500",
        _mbe_film("mbe_noslope", 0.125, 128, 500.0, [1.0, 50.0, 100.0, 500.0]),
    ),
    "mbe-noslope-film-desk": (
        "Thin film growth without slope selection at desk scale, T=10",
        _mbe_film("mbe_noslope", 0.125, 64, 10.0, [1.0, 10.0]),
    ),
    "pfc-crystallites": (
        "Polycrystal growth from three rotated seeds, (0,800)^2, T=2000",
        _pfc_crystallites(
            800.0, 1024, [[200.0, 400.0], [400.0, 400.0], [600.0, 400.0]],
            2000.0, [0.0, 100.0, 200.0, 500.0, 1000.0, 2000.0],
        ),
    ),
    "pfc-crystallites-desk": (
        "Polycrystal growth at desk scale, (0,240)^2, 256^2 modes, T=20",
        _pfc_crystallites(
            240.0, 256, [[60.0, 120.0], [120.0, 120.0], [180.0, 120.0]],
            20.0, [0.0, 10.0, 20.0],
        ),
    ),
}


def preset_names():
    return sorted(_PRESETS)


def preset_description(name):
    return _PRESETS[name][0]


def preset_config(name):
    """Deep copy of the raw config mapping for ``name``.

    Raises ``KeyError`` for unknown names; the CLI turns that into a
    config error with the list of known presets.
    """
    data = copy.deepcopy(_PRESETS[name][1])
    data.setdefault("output", {}).setdefault("directory", f"runs/{name}")
    return data
