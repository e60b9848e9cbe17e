"""Renormalized exponential-multistep time integrator.

The solution is factored as ``phi = R * psi`` with a scalar renormalization
``R`` carrying the energy bookkeeping.  Each step advances the pair with an
exponential multistep update in the spectral coefficients of ``psi`` and a
scalar constraint fixing ``R`` so that the discrete energy law

    E[phi^{n+1}] + theta ((R^{n+1})^2 - (R^n)^2) = E[phi^n] - max(I2, 0)

holds, where ``I2`` is the multistep quadrature of the dissipation norm.
The coupled system is solved by a decoupled Picard iteration with an inner
scalar Newton solve (bisection fallback) for ``R``.

Orders 1 and 2 are self-starting; order 3 takes one (optionally substepped)
order-2 step to fill its history.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .adaptive import next_dt
from .errors import (
    NewtonFailedError,
    NonFiniteFieldError,
    PicardDivergedError,
    RNearZeroError,
)
from .etd import StepGeometry, alpha_coeffs, beta_coeffs

R_FLOOR = 1e-6
NEWTON_MAX = 50
BISECT_MAX = 200
BRACKET_HALF_WIDTH = 0.5


@dataclass(eq=False)
class SpectralState:
    """Renormalized solution pair at one time level: ``phi = R * psi``."""

    R: float
    psi_coeffs: np.ndarray
    psi_nodal: np.ndarray
    t: float

    @property
    def phi_nodal(self):
        return self.R * self.psi_nodal


@dataclass(eq=False)
class HistoryLevel:
    """A stored time level plus the data the multistep tail reads from it.

    ``nl_spectrum`` and ``diss_sq`` are evaluated at the stored state when
    the level is created and never mutated afterwards.  ``dt_in`` is the
    step size that produced this level (0 for the initial condition).
    """

    state: SpectralState
    nl_spectrum: np.ndarray
    diss_sq: float
    dt_in: float


class StepHistory:
    """Ring buffer of the most recent time levels, newest last."""

    def __init__(self, maxlen=3):
        self._levels = deque(maxlen=maxlen)

    def push(self, level):
        self._levels.append(level)

    def level(self, j):
        """Level ``n - j`` for ``j = 0`` (newest), 1, 2."""
        return self._levels[-1 - j]

    @property
    def newest(self):
        return self._levels[-1]

    def __len__(self):
        return len(self._levels)


@dataclass(frozen=True)
class EnergyLedgerRow:
    """One accepted step in the energy ledger."""

    t: float
    dt: float
    E: float
    E_modified: float
    R: float
    picard_iters: int
    newton_iters: int
    clamp_active: bool
    mass: float


def required_history(order):
    """History depth needed before an order-``order`` step can run."""
    return max(1, order)


def clamp_dissipation(i2):
    """Clip the dissipation quadrature at zero; report whether it clipped."""
    clipped = i2 < 0.0
    return (0.0 if clipped else i2), clipped


def make_level(model, state, dt_in):
    """Build a history level, evaluating nonlinear data at the state."""
    profile = model.radial_profile(state.psi_coeffs, state.psi_nodal)
    return HistoryLevel(
        state=state,
        nl_spectrum=profile.nonlinear_spectrum(state.R),
        diss_sq=profile.dissipation(state.R),
        dt_in=dt_in,
    )


def initial_state(model, phi_nodal, t=0.0):
    """Project nodal data into the resolved span and wrap it with R = 1."""
    coeffs = model.to_coeffs(np.asarray(phi_nodal, dtype=float))
    return SpectralState(R=1.0, psi_coeffs=coeffs, psi_nodal=model.to_nodal(coeffs), t=t)


def initial_row(model, state):
    """Ledger row for the initial condition (dt = 0, no iterations)."""
    energy = model.energy(state.phi_nodal)
    theta = model.theta
    return EnergyLedgerRow(
        t=state.t,
        dt=0.0,
        E=energy,
        E_modified=energy + theta * (state.R**2 - 1.0),
        R=state.R,
        picard_iters=0,
        newton_iters=0,
        clamp_active=False,
        mass=model.mass(state.phi_nodal),
    )


def _solve_scalar(energy, denergy, theta, c, r_init):
    """Solve ``E(R) + theta R^2 = c`` for the root nearest ``r_init``.

    Newton from ``r_init`` with residual tolerance ``1e-12 max(1, |c|)``;
    falls back to bisection on ``r_init +- 0.5`` when Newton stalls.
    Returns ``(R, iterations)``.
    """
    tol = 1e-12 * max(1.0, abs(c))

    def g(R):
        return energy(R) + theta * R * R - c

    def polish(R, resid):
        # One extra Newton step once the residual test passes.  Stopping on
        # the residual alone leaves a one-sided error of tol / g'(R) every
        # step, which compounds coherently over long runs; the polished
        # root is accurate to rounding.
        slope = denergy(R) + 2.0 * theta * R
        if slope != 0.0 and math.isfinite(slope):
            refined = R - resid / slope
            if math.isfinite(refined):
                return refined
        return R

    R = float(r_init)
    iters = 0
    for _ in range(NEWTON_MAX):
        resid = g(R)
        if abs(resid) <= tol:
            return polish(R, resid), iters
        slope = denergy(R) + 2.0 * theta * R
        if slope == 0.0 or not math.isfinite(slope):
            break
        r_next = R - resid / slope
        iters += 1
        if not math.isfinite(r_next):
            break
        R = r_next
    if math.isfinite(R):
        resid = g(R)
        if abs(resid) <= tol:
            return polish(R, resid), iters

    lo = r_init - BRACKET_HALF_WIDTH
    hi = r_init + BRACKET_HALF_WIDTH
    g_lo, g_hi = g(lo), g(hi)
    if not (math.isfinite(g_lo) and math.isfinite(g_hi)) or g_lo * g_hi > 0.0:
        raise NewtonFailedError(
            f"no root of the renormalization equation in [{lo:g}, {hi:g}] "
            f"(Newton stalled after {iters} iterations)"
        )
    for _ in range(BISECT_MAX):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        iters += 1
        if abs(g_mid) <= tol:
            return polish(mid, g_mid), iters
        if g_lo * g_mid <= 0.0:
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
    raise NewtonFailedError(
        f"bisection did not reach tolerance {tol:g} after {BISECT_MAX} iterations"
    )


def solve_r(model, psi_nodal, c, r_init):
    """Public entry for the scalar solve against a given profile field."""
    psi_nodal = np.asarray(psi_nodal, dtype=float)
    profile = model.radial_profile(model.to_coeffs(psi_nodal), psi_nodal)
    R, _ = _solve_scalar(profile.energy, profile.denergy, model.theta, c, r_init)
    return R


def step_coefficients(model, dt, ratio, order):
    """Propagator and multistep weights for one step geometry."""
    geom = StepGeometry(dt=dt, order=order, ratio=ratio)
    symbol = model.linear_symbol()
    return np.exp(dt * symbol), alpha_coeffs(geom, symbol), beta_coeffs(geom)


def assemble_rhs(history, order, exp_term, alphas):
    """Explicit part of the update: propagated state minus the history tail."""
    newest = history.newest
    rhs = exp_term * (newest.state.R * newest.state.psi_coeffs)
    for j in range(order):
        rhs = rhs - alphas[j + 1] * history.level(j).nl_spectrum
    return rhs


def step(model, history, dt, order, *, picard_tol=1e-7, max_picard=100, coeffs=None):
    """Advance one step of the order-``order + 1`` scheme.

    On success the new level is pushed onto ``history`` and
    ``(state, row)`` is returned; on failure ``history`` is untouched.

    Raises
    ------
    PicardDivergedError
        Residual grew three sweeps in a row, hit ``max_picard``, or the
        iterate blew up to non-finite values.
    NewtonFailedError
        The inner scalar solve for R failed.
    RNearZeroError
        |R| fell below the division guard.
    """
    if len(history) < required_history(order):
        raise ValueError(
            f"order {order} needs {required_history(order)} history levels, "
            f"have {len(history)}"
        )
    newest = history.newest
    if order == 2:
        ratio = dt / newest.dt_in
    else:
        ratio = 1.0
    if coeffs is None:
        coeffs = step_coefficients(model, dt, ratio, order)
    exp_term, alphas, betas = coeffs

    theta = model.theta
    state_n = newest.state
    energy_n = model.energy(state_n.phi_nodal)
    target = energy_n + theta * state_n.R**2
    i2_hist = sum(betas[j + 1] * history.level(j).diss_sq for j in range(order))
    rhs = assemble_rhs(history, order, exp_term, alphas)

    R_m = state_n.R
    psi_m = state_n.psi_nodal
    coeffs_m = state_n.psi_coeffs
    residuals = []
    grow_streak = 0
    newton_total = 0
    clamped = False
    converged = False

    for sweep in range(max_picard):
        try:
            profile = model.radial_profile(coeffs_m, psi_m)
            i2_raw = betas[0] * profile.dissipation(R_m) + i2_hist
            i2, clamped = clamp_dissipation(i2_raw)
            R_next, iters = _solve_scalar(
                profile.energy, profile.denergy, theta, target - i2, R_m
            )
        except NonFiniteFieldError as exc:
            if sweep == 0:
                raise
            raise PicardDivergedError(
                f"iterate became non-finite on sweep {sweep + 1}", residuals
            ) from exc
        newton_total += iters
        if abs(R_next) < R_FLOOR:
            raise RNearZeroError(
                f"|R| = {abs(R_next):.3e} fell below {R_FLOOR:g} on sweep {sweep + 1}"
            )
        coeffs_next = (rhs - alphas[0] * profile.nonlinear_spectrum(R_next)) / R_next
        if not np.all(np.isfinite(coeffs_next.view(float))):
            raise PicardDivergedError(
                f"iterate became non-finite on sweep {sweep + 1}", residuals
            )
        psi_next = model.to_nodal(coeffs_next)
        res = float(np.max(np.abs(psi_m - psi_next)))
        grow_streak = grow_streak + 1 if residuals and res > residuals[-1] else 0
        residuals.append(res)
        R_m, psi_m, coeffs_m = R_next, psi_next, coeffs_next
        if res <= picard_tol:
            converged = True
            break
        if grow_streak >= 3:
            raise PicardDivergedError(
                f"residual grew {grow_streak} consecutive sweeps "
                f"(last {res:.3e})", residuals
            )
    if not converged:
        raise PicardDivergedError(
            f"no convergence within {max_picard} sweeps (last residual "
            f"{residuals[-1]:.3e})", residuals
        )

    # One confirming sweep against the converged field.  The loop exits
    # with R solved from the previous iterate, one sweep behind the psi it
    # is returned with; that O(picard_tol) mismatch is invisible in phi but
    # accumulates step over step in R.  Re-solving the scalar and
    # re-dividing the update by it shrinks the mismatch by the contraction
    # factor while keeping the conserved zero mode exact.
    profile = model.radial_profile(coeffs_m, psi_m)
    i2_raw = betas[0] * profile.dissipation(R_m) + i2_hist
    i2, clamped = clamp_dissipation(i2_raw)
    R_m, iters = _solve_scalar(profile.energy, profile.denergy, theta, target - i2, R_m)
    newton_total += iters
    if abs(R_m) < R_FLOOR:
        raise RNearZeroError(
            f"|R| = {abs(R_m):.3e} fell below {R_FLOOR:g} on the confirming sweep"
        )
    coeffs_m = (rhs - alphas[0] * profile.nonlinear_spectrum(R_m)) / R_m
    psi_prev = psi_m
    psi_m = model.to_nodal(coeffs_m)
    residuals.append(float(np.max(np.abs(psi_prev - psi_m))))

    state_new = SpectralState(R=R_m, psi_coeffs=coeffs_m, psi_nodal=psi_m, t=state_n.t + dt)
    # Nonlinear data stored with the level is recomputed at the accepted
    # state, not carried over from the last sweep's trial point.
    level = make_level(model, state_new, dt_in=dt)
    profile_new = model.radial_profile(coeffs_m, psi_m)
    energy_new = profile_new.energy(R_m)
    row = EnergyLedgerRow(
        t=state_new.t,
        dt=dt,
        E=energy_new,
        E_modified=energy_new + theta * (R_m**2 - 1.0),
        R=R_m,
        picard_iters=len(residuals),
        newton_iters=newton_total,
        clamp_active=clamped,
        mass=model.mass(state_new.phi_nodal),
    )
    history.push(level)
    return state_new, row


@dataclass(eq=False)
class RunResult:
    """Trajectory artifacts from :func:`run_flow`."""

    rows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    state: SpectralState | None = None
    history: StepHistory | None = None

    @property
    def final_row(self):
        return self.rows[-1]


def run_flow(
    model,
    phi0,
    *,
    t_end,
    order=1,
    dt=None,
    adaptive=None,
    estimator="energy",
    picard_tol=1e-7,
    max_picard=100,
    bootstrap_substeps=1,
    snapshot_times=(),
    row_callback=None,
    snapshot_callback=None,
):
    """Integrate ``phi0`` to ``t_end`` and collect the energy ledger.

    Parameters
    ----------
    model : model object
        Provides symbols, energies, and radial profiles.
    phi0 : ndarray
        Nodal initial data; projected into the resolved span.
    order : int
        Multistep order index r in {0, 1, 2} (scheme order r + 1).
    dt : float, optional
        Fixed step size; required when ``adaptive`` is None.
    adaptive : AdaptiveParams, optional
        Energy-variation step controller.  On Picard divergence the step
        is halved and retried down to ``dt_min``; fixed-step runs fail
        loudly instead.
    estimator : {"energy", "modified"}
        Ledger column driving the controller's backward difference.  The
        modified column tracks the scheme's own dissipation quadrature.
    bootstrap_substeps : int
        Number of substeps used for the single order-2 starting step of
        the order-3 scheme (shrinks startup error in order studies).
    snapshot_times : sequence of float
        Times to record ``phi``; steps land on them exactly.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1, or 2, got {order}")
    if adaptive is None and dt is None:
        raise ValueError("fixed-step runs require dt")
    if estimator not in ("energy", "modified"):
        raise ValueError(f"unknown energy-derivative estimator '{estimator}'")
    if bootstrap_substeps < 1:
        raise ValueError("bootstrap_substeps must be >= 1")

    state = initial_state(model, phi0)
    history = StepHistory()
    history.push(make_level(model, state, dt_in=0.0))
    result = RunResult(history=history, state=state)

    def emit_row(row):
        result.rows.append(row)
        if row_callback is not None:
            row_callback(row)

    def emit_snapshot(t, state):
        payload = (t, state.phi_nodal.copy())
        result.snapshots.append(payload)
        if snapshot_callback is not None:
            snapshot_callback(*payload)

    emit_row(initial_row(model, state))
    t_tol = 1e-12 * max(1.0, abs(t_end))
    snaps = deque(t for t in sorted(snapshot_times) if t <= t_end + t_tol)
    while snaps and snaps[0] <= state.t + t_tol:
        emit_snapshot(snaps.popleft(), state)

    cache = {}

    def cached_coeffs(dt_step, ratio, run_order):
        # Adaptive runs produce a fresh (dt, ratio) almost every step, so
        # the cache only pays off for fixed-step runs; cap it instead of
        # letting long adaptive trajectories hoard coefficient arrays.
        key = (dt_step, ratio, run_order)
        if key not in cache:
            if len(cache) >= 32:
                cache.clear()
            cache[key] = step_coefficients(model, dt_step, ratio, run_order)
        return cache[key]

    def propose_dt():
        if adaptive is None:
            return dt
        if estimator == "modified":
            grab = lambda row: row.E_modified
        else:
            grab = lambda row: row.E
        if len(result.rows) < 2:
            return next_dt(adaptive, grab(result.rows[-1]), 0.0, 0.0)
        return next_dt(
            adaptive, grab(result.rows[-1]), grab(result.rows[-2]), result.rows[-1].dt
        )

    while state.t < t_end - t_tol:
        run_order = min(order, len(history))
        dt_step = propose_dt()
        substeps = bootstrap_substeps if run_order < order else 1
        dt_step = min(dt_step, t_end - state.t)
        if snaps:
            dt_step = min(dt_step, snaps[0] - state.t)
        dt_step /= substeps
        for _ in range(substeps):
            while True:
                ratio = dt_step / history.newest.dt_in if run_order == 2 else 1.0
                try:
                    state, row = step(
                        model,
                        history,
                        dt_step,
                        run_order,
                        picard_tol=picard_tol,
                        max_picard=max_picard,
                        coeffs=cached_coeffs(dt_step, ratio, run_order),
                    )
                except PicardDivergedError:
                    if adaptive is None or dt_step <= adaptive.dt_min * (1 + 1e-12):
                        raise
                    dt_step = max(adaptive.dt_min, 0.5 * dt_step)
                    continue
                break
            emit_row(row)
        result.state = state
        while snaps and snaps[0] <= state.t + t_tol:
            emit_snapshot(snaps.popleft(), state)
    return result
