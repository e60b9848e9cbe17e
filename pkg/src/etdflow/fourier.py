"""Periodic pseudo-spectral space on a square two-dimensional domain.

Fields live on a uniform ``N x N`` grid over ``(0, L)^2`` with an even
number of nodes per axis; coefficients use the standard FFT layout with
integer modes ``-N/2 <= k <= N/2 - 1``.  The forward transform is
normalized so a pure mode ``exp(2i*pi*(k*x + l*y)/L)`` has amplitude one,
which makes linear symbols act as plain pointwise multipliers and gives
the Parseval identity ``integrate(f^2) = L^2 * sum |coeff|^2``.

Nonlinear terms are evaluated pointwise on the grid; the 2/3-rule
:meth:`PeriodicGrid.dealias` removes the aliased products this creates.
The Nyquist column has no negative-frequency partner, so it is zeroed in
the odd-order derivative symbols to keep derivatives of real fields real.
"""

from __future__ import annotations

import numpy as np

from etdflow.errors import HermitianSymmetryError, NonFiniteFieldError

__all__ = ["PeriodicGrid"]

# Tolerance (relative to the largest coefficient) for the conjugate
# symmetry check performed before every inverse transform.
_SYMMETRY_TOL = 1e-10


class PeriodicGrid:
    """Square periodic grid with cached wavenumber tables.

    Parameters
    ----------
    nodes_per_axis : int
        Even number of grid points per axis, at least 8.
    length : float
        Physical edge length of the domain.

    Attributes
    ----------
    nodes_per_axis, length, spacing : grid geometry.
    x : ndarray
        Nodal coordinates along one axis, ``j * spacing``.
    modes : ndarray
        Integer mode numbers in FFT order.
    k_sq : ndarray
        ``(2*pi*k/L)^2 + (2*pi*l/L)^2`` per mode, shape ``(N, N)``.
    """

    def __init__(self, nodes_per_axis, length):
        n = int(nodes_per_axis)
        if n < 8 or n % 2:
            raise ValueError(f"nodes_per_axis must be even and >= 8, got {nodes_per_axis}")
        if not (length > 0.0 and np.isfinite(length)):
            raise ValueError(f"length must be positive and finite, got {length}")
        self.nodes_per_axis = n
        self.length = float(length)
        self.spacing = self.length / n
        self.x = self.spacing * np.arange(n)

        self.modes = np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(int)
        tau = 2.0 * np.pi / self.length
        k = tau * self.modes
        self.k_sq = (k**2)[:, None] + (k**2)[None, :]

        # First-derivative wavenumbers with the partnerless Nyquist mode
        # removed, broadcastable along each axis.
        k_odd = k.copy()
        k_odd[n // 2] = 0.0
        self._ikx = (1j * k_odd)[:, None]
        self._iky = (1j * k_odd)[None, :]

        third = n // 3
        keep = np.abs(self.modes) <= third
        self._alias_keep = keep[:, None] & keep[None, :]

        flip = (-np.arange(n)) % n
        self._mirror = np.ix_(flip, flip)

    # ------------------------------------------------------------ geometry

    def nodes(self):
        """Coordinate arrays ``(X, Y)``, each of shape ``(N, N)``."""
        return np.meshgrid(self.x, self.x, indexing="ij")

    # ---------------------------------------------------------- transforms

    def forward(self, values):
        """Nodal field to mode amplitudes (pure mode -> amplitude one).

        The spectrum is symmetrized on the way out: the FFT of real data
        is conjugate-symmetric only to rounding, and that seed asymmetry
        would otherwise random-walk in state kept spectral across many
        steps.  Symmetric input survives the averaging bit-exactly.
        """
        values = np.asarray(values)
        if not np.all(np.isfinite(values)):
            raise NonFiniteFieldError("forward transform input")
        n = self.nodes_per_axis
        spec = np.fft.fft2(values) / (n * n)
        return 0.5 * (spec + np.conj(spec[self._mirror]))

    def inverse(self, coeffs):
        """Mode amplitudes to real nodal values.

        Raises
        ------
        HermitianSymmetryError
            If ``coeffs`` deviates from conjugate symmetry by more than
            ``1e-10`` relative to its largest amplitude.
        """
        coeffs = np.asarray(coeffs, dtype=complex)
        n = self.nodes_per_axis
        flip = (-np.arange(n)) % n
        mirror = np.conj(coeffs[np.ix_(flip, flip)])
        scale = np.max(np.abs(coeffs))
        if scale > 0.0:
            defect = np.max(np.abs(coeffs - mirror)) / scale
            if defect > _SYMMETRY_TOL:
                raise HermitianSymmetryError(
                    f"conjugate symmetry defect {defect:.3e} exceeds {_SYMMETRY_TOL:.0e}"
                )
        return np.fft.ifft2(coeffs).real * (n * n)

    # ------------------------------------------------------ mode operators

    def apply_symbol(self, coeffs, symbol):
        """Pointwise multiply coefficients by a per-mode symbol array."""
        return coeffs * symbol

    def gradient_nodal(self, coeffs):
        """Spectral gradient, returned as a pair of nodal fields."""
        n = self.nodes_per_axis
        fx = np.fft.ifft2(self._ikx * coeffs).real * (n * n)
        fy = np.fft.ifft2(self._iky * coeffs).real * (n * n)
        return fx, fy

    def dealias(self, coeffs):
        """Zero every mode with ``|k|`` or ``|l|`` above ``N/3`` (2/3 rule)."""
        return np.where(self._alias_keep, coeffs, 0.0)

    # ----------------------------------------------------------- functionals

    def integrate(self, values):
        """Trapezoid rule ``h^2 * sum`` (spectrally accurate on the torus)."""
        return float(np.sum(values)) * self.spacing**2

    def mode_norm_sq(self, coeffs, weight=None):
        """``L^2 * sum weight * |coeffs|^2``; Parseval value of a norm.

        With ``weight=None`` this equals ``integrate(f^2)`` for the field
        ``f`` the coefficients represent; a nonnegative symbol ``weight``
        turns it into the corresponding weighted seminorm.
        """
        mags = np.abs(coeffs) ** 2
        if weight is not None:
            mags = mags * weight
        return float(np.sum(mags)) * self.length**2
