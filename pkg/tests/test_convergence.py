"""Self-convergence harness: validation, slopes, saturation, partials.

The harness is itself validated on the linear heat equation, which every
order integrates exactly: all ladder errors must sit at roundoff and be
reported as saturated rather than fitted to a meaningless slope.
"""

import numpy as np
import pytest

from etdflow.convergence import SATURATION_FLOOR, self_convergence
from etdflow.errors import PicardDivergedError
from etdflow.fourier import PeriodicGrid
from etdflow.models import AllenCahn, ZeroPotential
from etdflow.solver import run_flow

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="module")
def grid():
    return PeriodicGrid(32, TWO_PI)


def heat_model(grid):
    return AllenCahn(grid, eps_sq=0.05, s=0.0, theta=1e4, potential=ZeroPotential())


def wavy(grid):
    X, Y = grid.nodes()
    return np.sin(2 * X) * np.cos(3 * Y) + 0.2 * np.cos(X)


# -------------------------------------------------------------- validation


def test_ladder_needs_three_members(grid):
    with pytest.raises(ValueError, match="3"):
        self_convergence(heat_model(grid), wavy(grid), t_end=0.1,
                         taus=[0.1, 0.05], order=1, ref_dt=1e-3)


def test_ladder_must_decrease(grid):
    with pytest.raises(ValueError, match="decrease"):
        self_convergence(heat_model(grid), wavy(grid), t_end=0.1,
                         taus=[0.1, 0.1, 0.05], order=1, ref_dt=1e-3)


def test_reference_must_undercut(grid):
    with pytest.raises(ValueError, match="undercut"):
        self_convergence(heat_model(grid), wavy(grid), t_end=0.1,
                         taus=[0.1, 0.05, 0.025], order=1, ref_dt=0.025)


# ---------------------------------------------------- exact-problem floor


@pytest.mark.parametrize("order", [0, 1, 2])
def test_heat_equation_saturates_at_roundoff(grid, order):
    result = self_convergence(
        heat_model(grid), wavy(grid), t_end=0.2, taus=[0.1, 0.05, 0.025],
        order=order, ref_dt=1e-3,
    )
    # The field is exact at every step size, so phi errors are roundoff
    # and no slope is fitted.  R is different: the heat equation still
    # dissipates energy, so the beta quadrature of ||mu||^2 carries real
    # O(dt^{r+1}) error into R even though the field does not see it.
    assert result.saturated
    assert all(e <= SATURATION_FLOOR for e in result.phi_errors)
    assert np.isnan(result.slope_phi)
    assert all(np.isnan(p) for p in result.pairwise_phi)
    assert result.r_errors[0] >= result.r_errors[-1]


# ----------------------------------------------------------- real slopes


def test_second_order_ladder_slope(grid):
    model = AllenCahn(grid, eps_sq=0.01, s=2.0, theta=10.0)
    result = self_convergence(
        model, wavy(grid), t_end=0.2, taus=[0.02, 0.01, 0.005, 0.0025],
        order=1, ref_dt=2e-4,
    )
    assert not result.saturated
    assert 1.8 <= result.slope_phi <= 2.2
    # Pairwise orders agree with the least-squares fit.
    finite = [p for p in result.pairwise_phi if np.isfinite(p)]
    assert all(1.7 <= p <= 2.3 for p in finite)


def test_errors_decrease_along_ladder(grid):
    model = AllenCahn(grid, eps_sq=0.01, s=2.0, theta=10.0)
    result = self_convergence(
        model, wavy(grid), t_end=0.2, taus=[0.02, 0.01, 0.005],
        order=0, ref_dt=2e-4,
    )
    assert result.phi_errors == sorted(result.phi_errors, reverse=True)


# ------------------------------------------------------------ table lines


def test_table_lines_shape(grid):
    result = self_convergence(
        heat_model(grid), wavy(grid), t_end=0.1, taus=[0.05, 0.025, 0.0125],
        order=1, ref_dt=1e-3,
    )
    lines = result.table_lines()
    assert lines[0] == "tau,phi_error,R_error,pairwise_order_phi,pairwise_order_R"
    assert len(lines) == 5
    assert lines[-1].startswith("# least-squares slopes:")
    assert "saturated" in lines[-1]
    # The last data row carries no pairwise entries.
    assert lines[-2].endswith(",,")


# --------------------------------------------------------------- partials


class _FakeState:
    def __init__(self, value):
        self.phi_nodal = np.full((2, 2), value)
        self.R = 1.0 + value


class _FakeResult:
    def __init__(self, value):
        self.state = _FakeState(value)


def _failing_run_flow(fail_at_dt):
    """Stub standing in for run_flow: errors scale with dt, one dt fails."""

    def fake(model, phi0, *, dt, **kw):
        if dt == fail_at_dt:
            raise PicardDivergedError(f"boom at dt={dt}")
        return _FakeResult(dt**2)

    return fake


def test_failed_ladder_member_attaches_partial_results(grid, monkeypatch):
    import etdflow.convergence as mod

    monkeypatch.setattr(mod, "run_flow", _failing_run_flow(fail_at_dt=0.025))
    with pytest.raises(PicardDivergedError) as err:
        self_convergence(object(), None, t_end=1.0, taus=[0.1, 0.05, 0.025, 0.0125],
                         order=1, ref_dt=1e-3)
    partial = err.value.partial
    assert partial["taus"] == [0.1, 0.05]
    assert len(partial["phi_errors"]) == 2
    assert partial["phi_errors"][0] > partial["phi_errors"][1]


def test_reference_failure_has_no_partial(grid, monkeypatch):
    import etdflow.convergence as mod

    monkeypatch.setattr(mod, "run_flow", _failing_run_flow(fail_at_dt=1e-3))
    with pytest.raises(PicardDivergedError) as err:
        self_convergence(object(), None, t_end=1.0, taus=[0.1, 0.05, 0.025],
                         order=1, ref_dt=1e-3)
    assert not hasattr(err.value, "partial")
