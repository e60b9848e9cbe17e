"""Gradient-flow models: symbols, nonlinear terms, energies, dissipation.

Each model couples a spatial backend (:class:`~etdflow.fourier.PeriodicGrid`
or :class:`~etdflow.legendre.NeumannBasis`) with the pieces the
renormalized exponential integrator needs:

* a nonpositive diagonal linear symbol ``L`` in coefficient space,
* the stabilized nonlinear term ``N(phi)`` whose coefficient-space image
  enters the multistep update,
* the chemical potential ``mu`` and the squared dissipation norm that
  drives the energy law (``||mu||^2`` for non-conserved flows,
  ``||grad mu||^2`` for conserved ones),
* the free energy ``E[phi]`` and its derivative along the ray
  ``R -> E[R psi]`` used by the scalar Newton solve.

The :meth:`radial_profile` factories bundle these quantities for a fixed
shape field ``psi``: they precompute every R-independent intermediate so
that evaluating energies, dissipation and nonlinear spectra at multiple
``R`` values inside one Picard sweep stays cheap.

Model constants follow the stabilized-splitting convention: the linear
part absorbs ``-s`` (or its conserved-flow analogue) and the nonlinear
term adds the compensating ``s``-dependent piece back, which keeps the
symbol nonpositive for every ``s >= 0``.
"""

from __future__ import annotations

import numpy as np

from etdflow.errors import NonFiniteFieldError
from etdflow.fourier import PeriodicGrid
from etdflow.legendre import NeumannBasis

__all__ = [
    "DoubleWell",
    "ZeroPotential",
    "AllenCahn",
    "CahnHilliard",
    "CahnHilliardPeriodic",
    "MbeSlopeSelection",
    "MbeNoSlopeSelection",
    "PhaseFieldCrystal",
    "build_model",
    "MODEL_KINDS",
]


class DoubleWell:
    """Quartic double-well potential ``F(phi) = (phi^2 - 1)^2 / 4``."""

    name = "double_well"

    def f(self, phi):
        return phi * phi * phi - phi

    def F(self, phi):
        q = phi * phi - 1.0
        return 0.25 * q * q


class ZeroPotential:
    """No bulk potential; turns AC/CH into pure linear diffusion."""

    name = "none"

    def f(self, phi):
        return np.zeros_like(phi)

    def F(self, phi):
        return np.zeros_like(phi)


def _require_finite(values, stage):
    if not np.all(np.isfinite(values)):
        raise NonFiniteFieldError(stage)
    return values


# =============================================================== periodic


class _PeriodicModel:
    """Shared plumbing for models living on :class:`PeriodicGrid`."""

    def __init__(self, grid, theta, dealias):
        if not isinstance(grid, PeriodicGrid):
            raise ValueError(f"{type(self).__name__} requires a PeriodicGrid backend")
        if theta < 0.0:
            raise ValueError(f"enforcing constant theta must be >= 0, got {theta}")
        self.grid = grid
        self.theta = float(theta)
        self.use_dealias = bool(dealias)

    @property
    def backend(self):
        return self.grid

    def to_coeffs(self, nodal):
        return self.grid.forward(nodal)

    def to_nodal(self, coeffs):
        return self.grid.inverse(coeffs)

    def integrate(self, nodal):
        return self.grid.integrate(nodal)

    def mass(self, nodal):
        return self.grid.integrate(nodal)

    def _dealias(self, coeffs):
        return self.grid.dealias(coeffs) if self.use_dealias else coeffs

    def energy_derivative_wrt_R(self, R, psi_nodal):
        """``d/dR E[R psi]``, the pairing ``(mu(R psi), psi)``."""
        profile = self.radial_profile(self.to_coeffs(psi_nodal), np.asarray(psi_nodal))
        return profile.denergy(R)


class AllenCahn(_PeriodicModel):
    """Non-conserved relaxation ``phi_t = eps^2 lap phi - f(phi)``.

    The free energy is ``int eps^2/2 |grad phi|^2 + F(phi)`` and the
    dissipation norm is the plain L2 norm of ``mu = -eps^2 lap phi + f``.
    """

    kind = "ac"
    conserves_mass = False

    def __init__(self, grid, eps_sq=0.01, s=2.0, theta=1e4, potential=None, dealias=True):
        super().__init__(grid, theta, dealias)
        if eps_sq <= 0.0:
            raise ValueError(f"eps_sq must be positive, got {eps_sq}")
        if s < 0.0:
            raise ValueError(f"stabilizer s must be >= 0, got {s}")
        self.eps_sq = float(eps_sq)
        self.s = float(s)
        self.potential = potential if potential is not None else DoubleWell()
        self.symbol = -(self.eps_sq * grid.k_sq) - self.s

    def linear_symbol(self):
        return self.symbol

    def nonlinear_term(self, phi_nodal):
        out = self.potential.f(phi_nodal) - self.s * phi_nodal
        return _require_finite(out, "AC nonlinear term")

    def nonlinear_spectrum(self, phi_coeffs, phi_nodal):
        return self._dealias(self.grid.forward(self.nonlinear_term(phi_nodal)))

    def chemical_potential(self, phi_nodal):
        c = self.grid.forward(phi_nodal)
        neg_lap = self.grid.inverse(self.eps_sq * self.grid.k_sq * c)
        return _require_finite(neg_lap + self.potential.f(phi_nodal), "AC chemical potential")

    def energy(self, phi_nodal):
        c = self.grid.forward(phi_nodal)
        quad = 0.5 * self.eps_sq * self.grid.mode_norm_sq(c, self.grid.k_sq)
        return quad + self.grid.integrate(self.potential.F(phi_nodal))

    def dissipation_norm_sq(self, phi_nodal):
        mu = self.chemical_potential(phi_nodal)
        return self.grid.integrate(mu * mu)

    def radial_profile(self, psi_coeffs, psi_nodal):
        return _AllenCahnProfile(self, psi_coeffs, psi_nodal)


class _AllenCahnProfile:
    def __init__(self, model, psi_coeffs, psi_nodal):
        self.model = model
        self.psi_nodal = psi_nodal
        self.psi_coeffs = psi_coeffs
        g = model.grid
        self._grad_sq = g.mode_norm_sq(psi_coeffs, g.k_sq)
        self._neg_lap = g.inverse(model.eps_sq * g.k_sq * psi_coeffs)

    def energy(self, R):
        m = self.model
        return 0.5 * m.eps_sq * R * R * self._grad_sq + m.grid.integrate(
            m.potential.F(R * self.psi_nodal)
        )

    def denergy(self, R):
        m = self.model
        bulk = m.grid.integrate(m.potential.f(R * self.psi_nodal) * self.psi_nodal)
        return m.eps_sq * R * self._grad_sq + bulk

    def dissipation(self, R):
        m = self.model
        mu = R * self._neg_lap + m.potential.f(R * self.psi_nodal)
        return m.grid.integrate(mu * mu)

    def nonlinear_spectrum(self, R):
        m = self.model
        return m.nonlinear_spectrum(R * self.psi_coeffs, R * self.psi_nodal)


class CahnHilliardPeriodic(_PeriodicModel):
    """Conserved double-well flow on the periodic grid.

    ``phi_t = lap mu`` with ``mu = -eps^2 lap phi + f(phi)``; the
    dissipation norm is ``||grad mu||^2 = sum k^2 |mu_hat|^2``.  The zero
    mode carries a zero symbol and a zero nonlinear image, so mass is
    conserved exactly.
    """

    kind = "ch_periodic"
    conserves_mass = True

    def __init__(self, grid, eps_sq=0.01, s=2.0, theta=1e4, potential=None, dealias=True):
        super().__init__(grid, theta, dealias)
        if eps_sq <= 0.0:
            raise ValueError(f"eps_sq must be positive, got {eps_sq}")
        if s < 0.0:
            raise ValueError(f"stabilizer s must be >= 0, got {s}")
        self.eps_sq = float(eps_sq)
        self.s = float(s)
        self.potential = potential if potential is not None else DoubleWell()
        self.symbol = -self.grid.k_sq * (self.eps_sq * self.grid.k_sq + self.s)

    def linear_symbol(self):
        return self.symbol

    def nonlinear_term(self, phi_nodal):
        """Nodal ``-lap(f(phi) - s phi)``: the update subtracts this term."""
        h = self.potential.f(phi_nodal) - self.s * phi_nodal
        _require_finite(h, "CH nonlinear term")
        return self.grid.inverse(self.grid.k_sq * self.grid.forward(h))

    def nonlinear_spectrum(self, phi_coeffs, phi_nodal):
        h = self.potential.f(phi_nodal) - self.s * phi_nodal
        _require_finite(h, "CH nonlinear term")
        return self.grid.k_sq * self._dealias(self.grid.forward(h))

    def _mu_hat(self, phi_coeffs, phi_nodal):
        g = self.grid
        return self.eps_sq * g.k_sq * phi_coeffs + g.forward(self.potential.f(phi_nodal))

    def chemical_potential(self, phi_nodal):
        g = self.grid
        c = g.forward(phi_nodal)
        return _require_finite(g.inverse(self._mu_hat(c, phi_nodal)), "CH chemical potential")

    def energy(self, phi_nodal):
        c = self.grid.forward(phi_nodal)
        quad = 0.5 * self.eps_sq * self.grid.mode_norm_sq(c, self.grid.k_sq)
        return quad + self.grid.integrate(self.potential.F(phi_nodal))

    def dissipation_norm_sq(self, phi_nodal):
        g = self.grid
        c = g.forward(phi_nodal)
        return g.mode_norm_sq(self._mu_hat(c, phi_nodal), g.k_sq)

    def radial_profile(self, psi_coeffs, psi_nodal):
        return _CahnHilliardPeriodicProfile(self, psi_coeffs, psi_nodal)


class _CahnHilliardPeriodicProfile:
    def __init__(self, model, psi_coeffs, psi_nodal):
        self.model = model
        self.psi_nodal = psi_nodal
        self.psi_coeffs = psi_coeffs
        g = model.grid
        self._grad_sq = g.mode_norm_sq(psi_coeffs, g.k_sq)
        self._stiff_hat = model.eps_sq * g.k_sq * psi_coeffs

    def energy(self, R):
        m = self.model
        return 0.5 * m.eps_sq * R * R * self._grad_sq + m.grid.integrate(
            m.potential.F(R * self.psi_nodal)
        )

    def denergy(self, R):
        m = self.model
        bulk = m.grid.integrate(m.potential.f(R * self.psi_nodal) * self.psi_nodal)
        return m.eps_sq * R * self._grad_sq + bulk

    def dissipation(self, R):
        # mu_hat(R psi) assembled spectrally; Parseval gives ||grad mu||^2.
        m = self.model
        mu_hat = R * self._stiff_hat + m.grid.forward(m.potential.f(R * self.psi_nodal))
        return m.grid.mode_norm_sq(mu_hat, m.grid.k_sq)

    def nonlinear_spectrum(self, R):
        m = self.model
        return m.nonlinear_spectrum(R * self.psi_coeffs, R * self.psi_nodal)


class MbeSlopeSelection(_PeriodicModel):
    """Epitaxial thin-film model with slope selection.

    ``E = int eps^2/2 (lap phi)^2 + (|grad phi|^2 - 1)^2/4`` with
    ``mu = eps^2 lap^2 phi - div((|grad phi|^2 - 1) grad phi)`` and L2
    dissipation of ``mu``.
    """

    kind = "mbe_slope"
    conserves_mass = False

    def __init__(self, grid, eps_sq=0.01, s=2.0, theta=1e4, dealias=True):
        super().__init__(grid, theta, dealias)
        if eps_sq <= 0.0:
            raise ValueError(f"eps_sq must be positive, got {eps_sq}")
        if s < 0.0:
            raise ValueError(f"stabilizer s must be >= 0, got {s}")
        self.eps_sq = float(eps_sq)
        self.s = float(s)
        self.symbol = -(self.eps_sq * grid.k_sq**2) - self.s * grid.k_sq

    def linear_symbol(self):
        return self.symbol

    def _slope_term_hat(self, phi_coeffs):
        """Spectrum of -div((|grad phi|^2 - 1) grad phi)."""
        g = self.grid
        fx, fy = g.gradient_nodal(phi_coeffs)
        w = fx * fx + fy * fy - 1.0
        _require_finite(w, "MBE slope flux")
        div_hat = g._ikx * g.forward(w * fx) + g._iky * g.forward(w * fy)
        return -div_hat

    def nonlinear_term(self, phi_nodal):
        c = self.grid.forward(phi_nodal)
        fm_hat = self._slope_term_hat(c)
        lap_hat = -self.grid.k_sq * c
        return self.grid.inverse(fm_hat + self.s * lap_hat)

    def nonlinear_spectrum(self, phi_coeffs, phi_nodal):
        fm_hat = self._slope_term_hat(phi_coeffs)
        out = self._dealias(fm_hat - self.s * self.grid.k_sq * phi_coeffs)
        return _require_finite(out, "MBE nonlinear spectrum")

    def chemical_potential(self, phi_nodal):
        # One inverse of the assembled spectrum: the k^4 symbol amplifies
        # transform roundoff, and summing first keeps the conjugate-symmetry
        # defect small relative to the full mu.
        g = self.grid
        c = g.forward(phi_nodal)
        return g.inverse(self.eps_sq * g.k_sq**2 * c + self._slope_term_hat(c))

    def energy(self, phi_nodal):
        g = self.grid
        c = g.forward(phi_nodal)
        quad = 0.5 * self.eps_sq * g.mode_norm_sq(c, g.k_sq**2)
        fx, fy = g.gradient_nodal(c)
        w = fx * fx + fy * fy - 1.0
        return quad + 0.25 * g.integrate(w * w)

    def dissipation_norm_sq(self, phi_nodal):
        mu = self.chemical_potential(phi_nodal)
        return self.grid.integrate(mu * mu)

    def radial_profile(self, psi_coeffs, psi_nodal):
        return _MbeSlopeProfile(self, psi_coeffs, psi_nodal)


class _MbeSlopeProfile:
    def __init__(self, model, psi_coeffs, psi_nodal):
        self.model = model
        self.psi_nodal = psi_nodal
        self.psi_coeffs = psi_coeffs
        g = model.grid
        self._bilap_sq = g.mode_norm_sq(psi_coeffs, g.k_sq**2)
        gx, gy = g.gradient_nodal(psi_coeffs)
        self._gsq = gx * gx + gy * gy
        # Spectrum of div(|grad psi|^2 grad psi): cubic part of the flux.
        cubic_hat = g._ikx * g.forward(self._gsq * gx) + g._iky * g.forward(self._gsq * gy)
        lap_hat = -g.k_sq * psi_coeffs
        self._cubic_hat = cubic_hat
        self._lap_hat = lap_hat
        self._cubic_d = model._dealias(cubic_hat)
        self._lap_d = model._dealias(lap_hat)
        self._bilap_hat = model.eps_sq * g.k_sq**2 * psi_coeffs

    def energy(self, R):
        m = self.model
        w = R * R * self._gsq - 1.0
        return 0.5 * m.eps_sq * R * R * self._bilap_sq + 0.25 * m.grid.integrate(w * w)

    def denergy(self, R):
        m = self.model
        bulk = m.grid.integrate((R * R * self._gsq - 1.0) * R * self._gsq)
        return m.eps_sq * R * self._bilap_sq + bulk

    def dissipation(self, R):
        # mu(R psi) = R eps^2 lap^2 psi - R^3 div(g grad psi) + R lap psi,
        # assembled spectrally; Parseval gives the L^2 norm directly.
        mu_hat = R * self._bilap_hat - R**3 * self._cubic_hat + R * self._lap_hat
        return self.model.grid.mode_norm_sq(mu_hat)

    def nonlinear_spectrum(self, R):
        s = self.model.s
        return -(R**3) * self._cubic_d + (1.0 + s) * R * self._lap_d


class MbeNoSlopeSelection(_PeriodicModel):
    """Epitaxial thin-film model without slope selection.

    ``E = int eps^2/2 (lap phi)^2 - ln(1 + |grad phi|^2)/2`` with
    ``mu = eps^2 lap^2 phi + div(grad phi / (1 + |grad phi|^2))``.
    """

    kind = "mbe_noslope"
    conserves_mass = False

    def __init__(self, grid, eps_sq=0.01, s=0.125, theta=1e4, dealias=True):
        super().__init__(grid, theta, dealias)
        if eps_sq <= 0.0:
            raise ValueError(f"eps_sq must be positive, got {eps_sq}")
        if s < 0.0:
            raise ValueError(f"stabilizer s must be >= 0, got {s}")
        self.eps_sq = float(eps_sq)
        self.s = float(s)
        self.symbol = -(self.eps_sq * grid.k_sq**2) - self.s * grid.k_sq

    def linear_symbol(self):
        return self.symbol

    def _curvature_term_hat(self, phi_coeffs):
        """Spectrum of div(grad phi / (1 + |grad phi|^2))."""
        g = self.grid
        fx, fy = g.gradient_nodal(phi_coeffs)
        denom = 1.0 + fx * fx + fy * fy
        _require_finite(denom, "MBE curvature flux")
        return g._ikx * g.forward(fx / denom) + g._iky * g.forward(fy / denom)

    def nonlinear_term(self, phi_nodal):
        c = self.grid.forward(phi_nodal)
        fm_hat = self._curvature_term_hat(c)
        return self.grid.inverse(fm_hat - self.s * self.grid.k_sq * c)

    def nonlinear_spectrum(self, phi_coeffs, phi_nodal):
        fm_hat = self._curvature_term_hat(phi_coeffs)
        out = self._dealias(fm_hat - self.s * self.grid.k_sq * phi_coeffs)
        return _require_finite(out, "MBE nonlinear spectrum")

    def chemical_potential(self, phi_nodal):
        # Single assembled inverse, as in the slope-selection variant.
        g = self.grid
        c = g.forward(phi_nodal)
        return g.inverse(self.eps_sq * g.k_sq**2 * c + self._curvature_term_hat(c))

    def energy(self, phi_nodal):
        g = self.grid
        c = g.forward(phi_nodal)
        quad = 0.5 * self.eps_sq * g.mode_norm_sq(c, g.k_sq**2)
        fx, fy = g.gradient_nodal(c)
        return quad - 0.5 * g.integrate(np.log1p(fx * fx + fy * fy))

    def dissipation_norm_sq(self, phi_nodal):
        mu = self.chemical_potential(phi_nodal)
        return self.grid.integrate(mu * mu)

    def radial_profile(self, psi_coeffs, psi_nodal):
        return _MbeNoSlopeProfile(self, psi_coeffs, psi_nodal)


class _MbeNoSlopeProfile:
    def __init__(self, model, psi_coeffs, psi_nodal):
        self.model = model
        self.psi_nodal = psi_nodal
        self.psi_coeffs = psi_coeffs
        g = model.grid
        self._bilap_sq = g.mode_norm_sq(psi_coeffs, g.k_sq**2)
        self._gx, self._gy = g.gradient_nodal(psi_coeffs)
        self._gsq = self._gx * self._gx + self._gy * self._gy
        self._lap_d = model._dealias(-g.k_sq * psi_coeffs)
        self._bilap_hat = model.eps_sq * g.k_sq**2 * psi_coeffs

    def _curvature_hat(self, R):
        g = self.model.grid
        denom = 1.0 + R * R * self._gsq
        return R * (
            g._ikx * g.forward(self._gx / denom) + g._iky * g.forward(self._gy / denom)
        )

    def energy(self, R):
        m = self.model
        quad = 0.5 * m.eps_sq * R * R * self._bilap_sq
        return quad - 0.5 * m.grid.integrate(np.log1p(R * R * self._gsq))

    def denergy(self, R):
        m = self.model
        bulk = -m.grid.integrate(R * self._gsq / (1.0 + R * R * self._gsq))
        return m.eps_sq * R * self._bilap_sq + bulk

    def dissipation(self, R):
        mu_hat = R * self._bilap_hat + self._curvature_hat(R)
        return self.model.grid.mode_norm_sq(mu_hat)

    def nonlinear_spectrum(self, R):
        m = self.model
        fm = m._dealias(self._curvature_hat(R))
        return fm + m.s * R * self._lap_d


class PhaseFieldCrystal(_PeriodicModel):
    """Swift-Hohenberg style conserved crystal model.

    ``E = int phi (lap + sigma)^2 phi / 2 + phi^4/4 - delta phi^2/2``
    evolving by ``phi_t = lap mu`` with
    ``mu = (lap + sigma)^2 phi + phi^3 - delta phi``; dissipation is the
    H1 seminorm of ``mu`` and the mean of ``phi`` is conserved.
    """

    kind = "pfc"
    conserves_mass = True

    def __init__(self, grid, sigma=1.0, delta=0.025, s=None, theta=1e4, dealias=True):
        super().__init__(grid, theta, dealias)
        if not 0.0 < delta < sigma * sigma:
            raise ValueError(f"PFC requires 0 < delta < sigma^2, got delta={delta}, sigma={sigma}")
        self.sigma = float(sigma)
        self.delta = float(delta)
        self.s = float(s) if s is not None else self.delta
        if self.s < 0.0:
            raise ValueError(f"stabilizer s must be >= 0, got {s}")
        # (lap + sigma)^2 acts as (sigma - k^2)^2 on modes.
        self._sh_sq = (self.sigma - grid.k_sq) ** 2
        self.symbol = -grid.k_sq * (self._sh_sq + self.s)

    def linear_symbol(self):
        return self.symbol

    def nonlinear_term(self, phi_nodal):
        g = self.grid
        c = g.forward(phi_nodal)
        cubic = g.forward(_require_finite(phi_nodal**3, "PFC cubic"))
        return g.inverse(g.k_sq * (cubic - (self.s + self.delta) * c))

    def nonlinear_spectrum(self, phi_coeffs, phi_nodal):
        g = self.grid
        cubic = g.forward(_require_finite(phi_nodal**3, "PFC cubic"))
        out = g.k_sq * (self._dealias(cubic) - (self.s + self.delta) * self._dealias(phi_coeffs))
        return out

    def _mu_hat(self, phi_coeffs, phi_nodal):
        cubic = self.grid.forward(_require_finite(phi_nodal**3, "PFC cubic"))
        return self._sh_sq * phi_coeffs + cubic - self.delta * phi_coeffs

    def chemical_potential(self, phi_nodal):
        g = self.grid
        return g.inverse(self._mu_hat(g.forward(phi_nodal), phi_nodal))

    def energy(self, phi_nodal):
        g = self.grid
        c = g.forward(phi_nodal)
        quad = 0.5 * g.mode_norm_sq(c, self._sh_sq)
        bulk = g.integrate(0.25 * phi_nodal**4 - 0.5 * self.delta * phi_nodal**2)
        return quad + bulk

    def dissipation_norm_sq(self, phi_nodal):
        g = self.grid
        return g.mode_norm_sq(self._mu_hat(g.forward(phi_nodal), phi_nodal), g.k_sq)

    def radial_profile(self, psi_coeffs, psi_nodal):
        return _PfcProfile(self, psi_coeffs, psi_nodal)


class _PfcProfile:
    def __init__(self, model, psi_coeffs, psi_nodal):
        self.model = model
        self.psi_nodal = psi_nodal
        self.psi_coeffs = psi_coeffs
        g = model.grid
        self._quad_sq = g.mode_norm_sq(psi_coeffs, model._sh_sq)
        self._q4 = g.integrate(psi_nodal**4)
        self._q2 = g.integrate(psi_nodal**2)
        cubic = g.forward(_require_finite(psi_nodal**3, "PFC cubic"))
        self._cubic_full = cubic
        self._cubic_d = model._dealias(cubic)
        self._psi_d = model._dealias(psi_coeffs)

    def energy(self, R):
        m = self.model
        return 0.5 * R * R * self._quad_sq + 0.25 * R**4 * self._q4 - 0.5 * m.delta * R * R * self._q2

    def denergy(self, R):
        m = self.model
        return R * self._quad_sq + R**3 * self._q4 - m.delta * R * self._q2

    def dissipation(self, R):
        # mu_hat scales as R (quadratic, linear) and R^3 (cubic): no
        # transforms left to do per R.
        m = self.model
        mu_hat = (
            R * m._sh_sq * self.psi_coeffs
            + R**3 * self._cubic_full
            - m.delta * R * self.psi_coeffs
        )
        return m.grid.mode_norm_sq(mu_hat, m.grid.k_sq)

    def nonlinear_spectrum(self, R):
        m = self.model
        return m.grid.k_sq * (R**3 * self._cubic_d - (m.s + m.delta) * R * self._psi_d)


# ================================================================ Neumann


class CahnHilliard:
    """Conserved double-well flow on the Legendre-Neumann backend.

    ``phi_t = lap mu`` with ``mu = -eps^2 lap phi + f(phi)``; in the
    eigenbasis the Laplacian is the diagonal multiplier
    ``-(lambda_k + lambda_l)`` and the dissipation norm is
    ``sum (lambda_k + lambda_l) mu_bar^2``.  Mass is conserved because
    the constant mode carries a zero symbol and a zero nonlinear image.
    """

    kind = "ch"
    conserves_mass = True

    def __init__(self, basis, eps_sq=2.5e-3, s=1.0, theta=1e4, potential=None):
        if not isinstance(basis, NeumannBasis):
            raise ValueError("CahnHilliard requires a NeumannBasis backend")
        if eps_sq <= 0.0:
            raise ValueError(f"eps_sq must be positive, got {eps_sq}")
        if s < 0.0:
            raise ValueError(f"stabilizer s must be >= 0, got {s}")
        if theta < 0.0:
            raise ValueError(f"enforcing constant theta must be >= 0, got {theta}")
        self.basis = basis
        self.eps_sq = float(eps_sq)
        self.s = float(s)
        self.theta = float(theta)
        self.potential = potential if potential is not None else DoubleWell()
        lam = basis.lam_sum
        self.symbol = -lam * (self.eps_sq * lam + self.s)

    @property
    def backend(self):
        return self.basis

    def to_coeffs(self, nodal):
        return self.basis.project_nonlinear(nodal)

    def to_nodal(self, coeffs):
        return self.basis.eigen_to_nodal(coeffs)

    def integrate(self, nodal):
        return self.basis.integrate(nodal)

    def mass(self, nodal):
        return self.basis.integrate(nodal)

    def linear_symbol(self):
        return self.symbol

    def nonlinear_term(self, phi_nodal):
        out = self.potential.f(phi_nodal) - self.s * phi_nodal
        return _require_finite(out, "CH nonlinear term")

    def nonlinear_spectrum(self, phi_coeffs, phi_nodal):
        h = self.basis.project_nonlinear(self.nonlinear_term(phi_nodal))
        return self.basis.lam_sum * h

    def chemical_potential(self, phi_nodal):
        """Eigen-coefficient matrix of ``mu``."""
        bar = self.basis.project_nonlinear(phi_nodal)
        h = self.basis.project_nonlinear(self.nonlinear_term(phi_nodal))
        return (self.eps_sq * self.basis.lam_sum + self.s) * bar + h

    def energy(self, phi_nodal):
        bar = self.basis.project_nonlinear(phi_nodal)
        quad = 0.5 * self.eps_sq * float(np.sum(self.basis.lam_sum * bar * bar))
        return quad + self.basis.integrate(self.potential.F(phi_nodal))

    def dissipation_norm_sq(self, phi_nodal):
        return self.basis.grad_norm_sq(self.chemical_potential(phi_nodal))

    def energy_derivative_wrt_R(self, R, psi_nodal):
        profile = self.radial_profile(self.to_coeffs(psi_nodal), np.asarray(psi_nodal))
        return profile.denergy(R)

    def radial_profile(self, psi_coeffs, psi_nodal):
        return _CahnHilliardProfile(self, psi_coeffs, psi_nodal)


class _CahnHilliardProfile:
    def __init__(self, model, psi_coeffs, psi_nodal):
        self.model = model
        self.psi_nodal = psi_nodal
        self.psi_coeffs = psi_coeffs
        self._lam_quad = float(np.sum(model.basis.lam_sum * psi_coeffs * psi_coeffs))

    def energy(self, R):
        m = self.model
        return 0.5 * m.eps_sq * R * R * self._lam_quad + m.basis.integrate(
            m.potential.F(R * self.psi_nodal)
        )

    def denergy(self, R):
        m = self.model
        bulk = m.basis.integrate(m.potential.f(R * self.psi_nodal) * self.psi_nodal)
        return m.eps_sq * R * self._lam_quad + bulk

    def _mu_bar(self, R):
        m = self.model
        h = m.basis.project_nonlinear(m.nonlinear_term(R * self.psi_nodal))
        return (m.eps_sq * m.basis.lam_sum + m.s) * R * self.psi_coeffs + h

    def dissipation(self, R):
        return self.model.basis.grad_norm_sq(self._mu_bar(R))

    def nonlinear_spectrum(self, R):
        m = self.model
        h = m.basis.project_nonlinear(m.nonlinear_term(R * self.psi_nodal))
        return m.basis.lam_sum * h


# ================================================================ factory

MODEL_KINDS = {
    "ac": AllenCahn,
    "ch": CahnHilliard,
    "ch_periodic": CahnHilliardPeriodic,
    "mbe_slope": MbeSlopeSelection,
    "mbe_noslope": MbeNoSlopeSelection,
    "pfc": PhaseFieldCrystal,
}


def build_model(kind, backend, **params):
    """Instantiate a model by kind string with backend type checking."""
    try:
        cls = MODEL_KINDS[kind]
    except KeyError:
        raise ValueError(
            f"unknown model kind '{kind}'; expected one of {sorted(MODEL_KINDS)}"
        ) from None
    return cls(backend, **params)
