"""Periodic backend: transforms, symbols, quadrature, dealiasing."""

import numpy as np
import pytest

from etdflow.errors import HermitianSymmetryError, NonFiniteFieldError
from etdflow.fourier import PeriodicGrid


@pytest.fixture(scope="module")
def grid():
    return PeriodicGrid(32, 2.0 * np.pi)


def random_field(grid, seed, band=None):
    """Smooth real field built from seeded random low modes."""
    rng = np.random.default_rng(seed)
    n = grid.nodes_per_axis
    band = band if band is not None else n // 4
    c = np.zeros((n, n), dtype=complex)
    for _ in range(12):
        k, l = rng.integers(-band, band + 1, size=2)
        amp = rng.normal() + 1j * rng.normal()
        c[k % n, l % n] += amp
        c[(-k) % n, (-l) % n] += np.conj(amp)
    return grid.inverse(c)


# ----------------------------------------------------------- construction


def test_grid_rejects_odd_or_small_counts():
    with pytest.raises(ValueError):
        PeriodicGrid(33, 1.0)
    with pytest.raises(ValueError):
        PeriodicGrid(4, 1.0)
    with pytest.raises(ValueError):
        PeriodicGrid(32, 0.0)


def test_mode_layout(grid):
    assert grid.modes[0] == 0
    assert grid.modes[16] == -16
    assert grid.modes.min() == -16 and grid.modes.max() == 15


# ------------------------------------------------------------- transforms


def test_forward_constant_field(grid):
    c = grid.forward(np.full((32, 32), 3.0))
    assert c[0, 0] == pytest.approx(3.0, abs=1e-14)
    c[0, 0] = 0.0
    assert np.max(np.abs(c)) < 1e-13


def test_forward_single_cosine(grid):
    X, _ = grid.nodes()
    c = grid.forward(np.cos(X))
    assert c[1, 0] == pytest.approx(0.5, abs=1e-14)
    assert c[-1, 0] == pytest.approx(0.5, abs=1e-14)
    c[1, 0] = c[-1, 0] = 0.0
    assert np.max(np.abs(c)) < 1e-13


def test_round_trip_random(grid):
    f = random_field(grid, seed=7)
    back = grid.inverse(grid.forward(f))
    assert np.max(np.abs(back - f)) < 1e-12 * max(1.0, np.max(np.abs(f)))


def test_forward_rejects_nonfinite(grid):
    bad = np.zeros((32, 32))
    bad[3, 4] = np.nan
    with pytest.raises(NonFiniteFieldError):
        grid.forward(bad)


def test_inverse_rejects_asymmetric(grid):
    c = np.zeros((32, 32), dtype=complex)
    c[1, 0] = 1.0  # no conjugate partner at (-1, 0)
    with pytest.raises(HermitianSymmetryError):
        grid.inverse(c)


# ---------------------------------------------------------------- symbols


def test_apply_symbol_identity(grid):
    f = random_field(grid, seed=3)
    c = grid.forward(f)
    np.testing.assert_array_equal(grid.apply_symbol(c, np.ones((32, 32))), c)


def test_laplacian_symbol_eigenfunction(grid):
    X, _ = grid.nodes()
    c = grid.forward(np.cos(X))
    lap = grid.inverse(grid.apply_symbol(c, -grid.k_sq))
    np.testing.assert_allclose(lap, -np.cos(X), atol=1e-12)


def test_laplacian_matches_second_differences_at_second_order():
    # The five-point stencil error is O(h^2); the spectral result is exact
    # for this band-limited field, so their difference must shrink by 4x.
    errs = []
    for n in (128, 256):
        g = PeriodicGrid(n, 2.0 * np.pi)
        f = random_field(g, seed=11, band=8)
        lap_spec = g.inverse(g.apply_symbol(g.forward(f), -g.k_sq))
        stencil = (
            np.roll(f, 1, 0) + np.roll(f, -1, 0) + np.roll(f, 1, 1) + np.roll(f, -1, 1) - 4 * f
        ) / g.spacing**2
        errs.append(np.max(np.abs(lap_spec - stencil)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


def test_gradient_constant_is_zero(grid):
    fx, fy = grid.gradient_nodal(grid.forward(np.full((32, 32), 1.5)))
    assert np.max(np.abs(fx)) < 1e-13
    assert np.max(np.abs(fy)) < 1e-13


def test_gradient_single_sine(grid):
    X, _ = grid.nodes()
    fx, fy = grid.gradient_nodal(grid.forward(np.sin(X)))
    np.testing.assert_allclose(fx, np.cos(X), atol=1e-12)
    assert np.max(np.abs(fy)) < 1e-12


def test_gradient_matches_central_differences_at_second_order():
    errs = []
    for n in (128, 256):
        g = PeriodicGrid(n, 2.0 * np.pi)
        f = random_field(g, seed=5, band=8)
        fx, _ = g.gradient_nodal(g.forward(f))
        central = (np.roll(f, -1, 0) - np.roll(f, 1, 0)) / (2 * g.spacing)
        errs.append(np.max(np.abs(fx - central)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


def test_gradient_zeroes_nyquist_mode(grid):
    c = np.zeros((32, 32), dtype=complex)
    c[16, 0] = 1.0  # Nyquist column, self-conjugate
    fx, fy = grid.gradient_nodal(c)
    assert np.max(np.abs(fx)) == 0.0
    assert np.max(np.abs(fy)) == 0.0


# ------------------------------------------------------------- quadrature


def test_integrate_constant(grid):
    assert grid.integrate(np.ones((32, 32))) == pytest.approx((2 * np.pi) ** 2, rel=1e-15)


def test_integrate_single_sine_vanishes(grid):
    X, _ = grid.nodes()
    assert abs(grid.integrate(np.sin(X))) < 1e-12


def test_integrate_cosine_squared(grid):
    X, _ = grid.nodes()
    assert grid.integrate(np.cos(X) ** 2) == pytest.approx(2 * np.pi**2, rel=1e-13)


def test_parseval(grid):
    f = random_field(grid, seed=19)
    lhs = grid.integrate(f * f)
    rhs = grid.mode_norm_sq(grid.forward(f))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_weighted_mode_norm_is_gradient_norm(grid):
    f = random_field(grid, seed=23)
    c = grid.forward(f)
    fx, fy = grid.gradient_nodal(c)
    direct = grid.integrate(fx * fx + fy * fy)
    assert grid.mode_norm_sq(c, weight=grid.k_sq) == pytest.approx(direct, rel=1e-10)


# -------------------------------------------------------------- dealiasing


def test_dealias_keeps_low_modes_and_kills_high(grid):
    c = np.zeros((32, 32), dtype=complex)
    c[1, 0] = 1.0
    c[15, 0] = 2.0  # |k| = N/2 - 1 > 32/3
    out = grid.dealias(c)
    assert out[1, 0] == 1.0
    assert out[15, 0] == 0.0


def test_dealias_cubic_alias_image_removed():
    # N = 16, f = cos(3x): f^3 = (3 cos 3x + cos 9x)/4 and mode 9 aliases
    # to mode 7 on the grid.  The 2/3 cutoff keeps |k| <= 5, so the alias
    # image must vanish while the exact in-band amplitude 3/8 survives.
    g = PeriodicGrid(16, 2.0 * np.pi)
    X, _ = g.nodes()
    cube = g.forward(np.cos(3 * X) ** 3)
    assert cube[7, 0] == pytest.approx(0.125, abs=1e-13)  # alias of mode 9
    out = g.dealias(cube)
    assert out[7, 0] == 0.0
    assert out[-7, 0] == 0.0
    assert out[3, 0] == pytest.approx(0.375, abs=1e-13)
    assert out[-3, 0] == pytest.approx(0.375, abs=1e-13)


# ------------------------------------------------------------- invariants


def test_operators_preserve_hermitian_symmetry(grid):
    f = random_field(grid, seed=29)
    c = grid.forward(f)
    n = 32
    flip = (-np.arange(n)) % n

    def defect(a):
        return np.max(np.abs(a - np.conj(a[np.ix_(flip, flip)])))

    assert defect(grid.apply_symbol(c, -grid.k_sq)) < 1e-12
    assert defect(grid.dealias(c)) < 1e-12
    assert defect(grid._ikx * c) < 1e-12  # derivative symbol with Nyquist zeroed


def test_forward_output_is_exactly_symmetric(grid):
    # Exactly, not approximately: raw FFTs of real data are symmetric only
    # to rounding, and a seed defect would random-walk over the thousands
    # of forward/combine cycles of a long run until it trips the inverse
    # guard.  forward() therefore symmetrizes on the way out.
    f = random_field(grid, seed=43)
    c = grid.forward(f)
    n = 32
    flip = (-np.arange(n)) % n
    mirror = np.conj(c[np.ix_(flip, flip)])
    assert np.array_equal(c, mirror)


def test_operators_are_linear(grid):
    f = random_field(grid, seed=31)
    h = random_field(grid, seed=37)
    a, b = 1.3, -0.7
    lhs = grid.forward(a * f + b * h)
    rhs = a * grid.forward(f) + b * grid.forward(h)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_propagator_semigroup(grid):
    f = random_field(grid, seed=41)
    c = grid.forward(f)
    L = -(0.01 * grid.k_sq + 2.0)
    one = grid.apply_symbol(grid.apply_symbol(c, np.exp(0.3 * L)), np.exp(0.45 * L))
    two = grid.apply_symbol(c, np.exp(0.75 * L))
    assert np.max(np.abs(one - two)) < 1e-12 * np.max(np.abs(c))
