"""Initial conditions: named analytic profiles, seeded random fields, and
polycrystal block layouts.

Random data comes from a counter-based 64-bit mixer (the splitmix64
output function applied to an affine counter sequence), so a given
``(seed, shape)`` pair yields identical bytes on every platform and
NumPy version.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

# splitmix64 constants (Steele, Lea & Flood's mixer).
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

CRYSTAL_BACKGROUND = 0.285
CRYSTAL_AMPLITUDE = 0.446
CRYSTAL_WAVE = 0.66
BLOCK_LENGTH = 40.0


def _mix64(values):
    z = values.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def uniform_counter_stream(seed, count, offset=0):
    """``count`` doubles in [0, 1) from the seeded counter generator."""
    counters = np.arange(offset, offset + count, dtype=np.uint64)
    state = (np.uint64(seed) + (counters + np.uint64(1)) * _GAMMA).astype(np.uint64)
    bits = _mix64(state)
    # Top 53 bits give a dyadic rational in [0, 1).
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


def seeded_random_field(seed, amplitude, shape):
    """I.i.d. uniform values in [-amplitude, amplitude], row-major order."""
    if amplitude <= 0.0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    flat = uniform_counter_stream(seed, int(np.prod(shape)))
    return amplitude * (2.0 * flat - 1.0).reshape(shape)


def _profile_ac_waves(X, Y):
    return np.sin(2 * X) * np.cos(3 * Y)


def _profile_ch_cosines(X, Y):
    return 0.1 * (np.cos(3 * X) * np.cos(2 * Y) + np.cos(5 * X) * np.cos(5 * Y))


def _profile_mbe_sines(X, Y):
    return 0.1 * (np.sin(3 * X) * np.sin(2 * Y) + np.sin(5 * X) * np.sin(5 * Y))


def _profile_pfc_stripe(X, Y):
    return np.sin(np.pi * X / 16.0) * np.cos(np.pi * Y / 16.0)


NAMED_PROFILES = {
    "ac_waves": _profile_ac_waves,
    "ch_cosines": _profile_ch_cosines,
    "mbe_sines": _profile_mbe_sines,
    "pfc_stripe": _profile_pfc_stripe,
}


def analytic_profile(name, X, Y):
    """Evaluate a named analytic initial profile on nodal coordinates."""
    try:
        fn = NAMED_PROFILES[name]
    except KeyError:
        known = ", ".join(sorted(NAMED_PROFILES))
        raise ConfigError(f"unknown initial profile '{name}' (known: {known})") from None
    return fn(np.asarray(X), np.asarray(Y))


def _lattice_profile(x_l, y_l):
    a = CRYSTAL_WAVE / np.sqrt(3.0)
    return CRYSTAL_BACKGROUND + CRYSTAL_AMPLITUDE * (
        np.cos(a * y_l) * np.cos(CRYSTAL_WAVE * x_l) - 0.5 * np.cos(2.0 * a * y_l)
    )


def validate_crystal_layout(centers, angles, domain):
    """Check a block layout; returns a (possibly empty) list of problems."""
    centers = [tuple(map(float, c)) for c in centers]
    problems = []
    if len(centers) != len(angles):
        problems.append(
            f"{len(centers)} block centers but {len(angles)} orientation angles"
        )
    lo, hi = float(domain[0]), float(domain[1])
    half = BLOCK_LENGTH / 2.0
    for i, (cx, cy) in enumerate(centers):
        if not (lo <= cx - half and cx + half <= hi and lo <= cy - half and cy + half <= hi):
            problems.append(
                f"block {i} at ({cx:g}, {cy:g}) does not fit in "
                f"[{lo:g}, {hi:g}]^2 with side {BLOCK_LENGTH:g}"
            )
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            dx = abs(centers[i][0] - centers[j][0])
            dy = abs(centers[i][1] - centers[j][1])
            if dx < BLOCK_LENGTH and dy < BLOCK_LENGTH:
                problems.append(f"blocks {i} and {j} overlap")
    return problems


def crystallite_field(X, Y, centers, angles, domain):
    """Rotated hexagonal-lattice patches on a constant background.

    Each patch is an axis-aligned square block of side ``BLOCK_LENGTH``
    centered at ``centers[i]``; inside it the lattice profile is evaluated
    in rotated local coordinates ``x_l = dx sin(a) + dy cos(a)``,
    ``y_l = dx cos(a) - dy sin(a)``.  Blocks must fit inside ``domain``
    and must not overlap.
    """
    centers = [tuple(map(float, c)) for c in centers]
    angles = [float(a) for a in angles]
    half = BLOCK_LENGTH / 2.0
    problems = validate_crystal_layout(centers, angles, domain)
    if problems:
        raise ConfigError(problems)

    field = np.full(np.broadcast(X, Y).shape, CRYSTAL_BACKGROUND)
    for (cx, cy), alpha in zip(centers, angles):
        dx = X - cx
        dy = Y - cy
        inside = (np.abs(dx) <= half) & (np.abs(dy) <= half)
        x_l = dx * np.sin(alpha) + dy * np.cos(alpha)
        y_l = dx * np.cos(alpha) - dy * np.sin(alpha)
        field = np.where(inside, _lattice_profile(x_l, y_l), field)
    return field
