"""Exponential multistep coefficients on nonuniform time grids.

For a diagonalized evolution equation

.. math:: \\hat{u}_t = L \\hat{u} - \\hat{N}(t),

the variation-of-constants solution over one step :math:`\\Delta t_{n+1}`
is discretized by replacing :math:`\\hat{N}` with its Lagrange interpolant
through the stored levels :math:`t_{n+1}, t_n, \\dots, t_{n-r+1}` and
integrating exactly against the kernel :math:`e^{L(t_{n+1}-\\tau)}`.  This
module provides the interpolation weights, the :math:`\\varphi`-function
building blocks, and the resulting update coefficients

.. math::

    \\alpha^{(r,j)} = \\int_{t_n}^{t_{n+1}}
        e^{L(t_{n+1}-\\tau)} \\ell_j(\\tau)\\, d\\tau, \\qquad
    \\beta^{(r,j)} = \\int_{t_n}^{t_{n+1}} \\ell_j(\\tau)\\, d\\tau,

for interpolation degrees r = 0, 1, 2 and an arbitrary ratio
``gamma`` between the incoming and previous step sizes.  Coefficient
arrays are indexed ``j = -1, 0, ..., r-1`` starting with the implicit
level ``t_{n+1}``, matching the layout of the solver history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "StepGeometry",
    "lagrange_weights",
    "phi_base",
    "alpha_coeffs",
    "beta_coeffs",
]

# The recurrence a2 = (2*a1 - dt)/z amplifies rounding like 6*eps/z^2,
# so below this |L*dt| a degree-12 Taylor expansion takes over.  Both
# branches are then accurate to better than 1e-14 relative at the seam.
_TAYLOR_CUTOFF = 0.5

# Taylor coefficients of phi1, phi2 and phi3 around z = 0:
# phi_p(z) = sum_m z^m / (m + p)!.
_PHI1_C = np.array([1.0 / math.factorial(m + 1) for m in range(13)])
_PHI2_C = np.array([1.0 / math.factorial(m + 2) for m in range(13)])
_PHI3_C = np.array([1.0 / math.factorial(m + 3) for m in range(13)])


@dataclass(frozen=True)
class StepGeometry:
    """Shape of one multistep update.

    Parameters
    ----------
    dt : float
        Incoming step size ``t_{n+1} - t_n``; must be positive.
    order : int
        Interpolation degree ``r`` in {0, 1, 2}.  The update is accurate
        to order ``r + 1`` in time.
    ratio : float
        Step-size ratio ``dt / (t_n - t_{n-1})``.  Only consulted for
        ``order == 2``; must be positive.
    """

    dt: float
    order: int = 0
    ratio: float = 1.0

    def __post_init__(self):
        if not (self.dt > 0.0 and np.isfinite(self.dt)):
            raise ValueError(f"step size must be positive and finite, got {self.dt}")
        if self.order not in (0, 1, 2):
            raise ValueError(f"interpolation degree must be 0, 1 or 2, got {self.order}")
        if not (self.ratio > 0.0 and np.isfinite(self.ratio)):
            raise ValueError(f"step ratio must be positive and finite, got {self.ratio}")


def lagrange_weights(order, eta, ratio=1.0):
    """Lagrange basis values for the stored time levels.

    The interpolation nodes sit at ``eta = 1`` (level ``t_{n+1}``),
    ``eta = 0`` (level ``t_n``) and, for ``order == 2``,
    ``eta = -1/ratio`` (level ``t_{n-1}``), where
    ``eta = (t - t_n) / dt`` is the scaled time coordinate.

    Parameters
    ----------
    order : int
        Interpolation degree r in {0, 1, 2}.
    eta : float or ndarray
        Evaluation coordinate(s).
    ratio : float
        Step-size ratio ``gamma``; used only for ``order == 2``.

    Returns
    -------
    ndarray
        Weights stacked along the first axis in the order
        ``j = -1, 0, ..., r-1``.  They sum to one for every ``eta``.
    """
    eta = np.asarray(eta, dtype=float)
    if order == 0:
        return np.stack([np.ones_like(eta)])
    if order == 1:
        return np.stack([eta, 1.0 - eta])
    if order == 2:
        g = float(ratio)
        w_new = (g * eta + 1.0) * eta / (1.0 + g)
        w_cur = (1.0 - eta) * (1.0 + g * eta)
        w_old = g * g * (eta - 1.0) * eta / (1.0 + g)
        return np.stack([w_new, w_cur, w_old])
    raise ValueError(f"interpolation degree must be 0, 1 or 2, got {order}")


def _phi_taylor(z):
    """Evaluate phi1..phi3 by their degree-12 Taylor polynomials."""
    p1 = np.polynomial.polynomial.polyval(z, _PHI1_C)
    p2 = np.polynomial.polynomial.polyval(z, _PHI2_C)
    p3 = np.polynomial.polynomial.polyval(z, _PHI3_C)
    return p1, p2, p3


def phi_base(L, dt):
    """Base integrals ``a0, a1, a2`` of the exponential kernel.

    These are scaled phi functions of ``z = L * dt``:

    .. math::

        a_0 = \\Delta t\\, \\varphi_1(z), \\quad
        a_1 = \\Delta t\\, \\varphi_2(z), \\quad
        a_2 = 2 \\Delta t\\, \\varphi_3(z),

    computed from ``expm1`` and the downward recurrences
    ``a1 = (a0 - dt)/z``, ``a2 = (2*a1 - dt)/z`` when ``|z|`` is large
    enough, and from Taylor expansions otherwise.  At ``L = 0`` the values
    are exactly ``dt``, ``dt/2`` and ``dt/3``.

    Parameters
    ----------
    L : float or ndarray
        Linear symbol value(s).
    dt : float
        Step size; must be positive.

    Returns
    -------
    tuple of ndarray
        ``(a0, a1, a2)`` with the shape of ``L``.
    """
    if not dt > 0.0:
        raise ValueError(f"step size must be positive, got {dt}")
    L = np.asarray(L, dtype=float)
    z = L * dt
    small = np.abs(z) < _TAYLOR_CUTOFF

    # Taylor branch; evaluated everywhere, then masked.
    t1, t2, t3 = _phi_taylor(np.where(small, z, 0.0))

    # Recurrence branch; guard the small-z entries against division by zero.
    zs = np.where(small, 1.0, z)
    a0_rec = np.expm1(zs) / zs
    a1_rec = (a0_rec - 1.0) / zs
    a2_rec = (2.0 * a1_rec - 1.0) / zs

    a0 = dt * np.where(small, t1, a0_rec)
    a1 = dt * np.where(small, t2, a1_rec)
    a2 = dt * np.where(small, 2.0 * t3, a2_rec)
    return a0, a1, a2


def alpha_coeffs(geom, L):
    """Exponential update coefficients ``alpha^(r,j)``.

    Parameters
    ----------
    geom : StepGeometry
        Step size, interpolation degree and step ratio.
    L : float or ndarray
        Linear symbol value(s).

    Returns
    -------
    ndarray
        Shape ``(r + 1,) + shape(L)``, ordered ``j = -1, 0, ..., r-1``.
        The coefficients satisfy ``sum_j alpha^(r,j) = a0`` for every r.
    """
    a0, a1, a2 = phi_base(L, geom.dt)
    if geom.order == 0:
        return np.stack([a0])
    if geom.order == 1:
        return np.stack([a1, a0 - a1])
    g = geom.ratio
    return np.stack(
        [
            (a1 + g * a2) / (1.0 + g),
            a0 - a1 + g * (a1 - a2),
            -g * g * (a1 - a2) / (1.0 + g),
        ]
    )


def beta_coeffs(geom):
    """Interpolant integrals ``beta^(r,j)`` over one step.

    These are the ``L = 0`` limits of the alpha coefficients; they sum
    to ``dt`` exactly.  For ``order == 2`` the oldest weight is negative,
    which is why the solver clamps the dissipation quadrature rather
    than assuming positivity term by term.

    Returns
    -------
    ndarray
        Shape ``(r + 1,)``, ordered ``j = -1, 0, ..., r-1``.
    """
    dt = geom.dt
    if geom.order == 0:
        return np.array([dt])
    if geom.order == 1:
        return np.array([0.5 * dt, 0.5 * dt])
    g = geom.ratio
    return np.array(
        [
            dt * (2.0 * g + 3.0) / (6.0 * (1.0 + g)),
            dt * (3.0 + g) / 6.0,
            -dt * g * g / (6.0 * (1.0 + g)),
        ]
    )
