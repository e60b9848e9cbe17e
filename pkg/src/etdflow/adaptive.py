"""Energy-variation adaptive step controller.

The proposed step shrinks where the energy moves fast and saturates at
``dt_max`` on energy plateaus:

    dt_next = max(dt_min, dt_max / sqrt(1 + gamma_adp * E'(t_n)^2))

with ``E'`` estimated by a backward difference of the ledger energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class AdaptiveParams:
    """Controller bounds and sensitivity; ``0 < dt_min <= dt_max``."""

    dt_min: float
    dt_max: float
    gamma_adp: float

    def __post_init__(self):
        if not (0.0 < self.dt_min <= self.dt_max) or not math.isfinite(self.dt_max):
            raise ValueError(
                f"need 0 < dt_min <= dt_max, got [{self.dt_min}, {self.dt_max}]"
            )
        if self.gamma_adp < 0.0 or not math.isfinite(self.gamma_adp):
            raise ValueError(f"gamma_adp must be >= 0, got {self.gamma_adp}")


def next_dt(params, e_curr, e_prev, dt_prev):
    """Step proposal from the backward-difference energy slope.

    Degenerate inputs (``dt_prev <= 0`` or non-finite data) fall back to
    ``dt_min``.  The result always lies in ``[dt_min, dt_max]`` and is
    monotone non-increasing in ``|E'|``.
    """
    if dt_prev <= 0.0 or not all(map(math.isfinite, (e_curr, e_prev, dt_prev))):
        return params.dt_min
    slope = (e_curr - e_prev) / dt_prev
    proposal = params.dt_max / math.sqrt(1.0 + params.gamma_adp * slope * slope)
    return min(params.dt_max, max(params.dt_min, proposal))
