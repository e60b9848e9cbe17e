"""Initial data: counter RNG determinism, profiles, crystallite layouts.

The random-field generator is checked against a scalar pure-Python
splitmix64 written from the published algorithm, plus the reference
test vectors for seed 0 (first three outputs of the standard sequence).
"""

import numpy as np
import pytest

from etdflow.errors import ConfigError
from etdflow.initial import (
    BLOCK_LENGTH,
    NAMED_PROFILES,
    analytic_profile,
    crystallite_field,
    seeded_random_field,
    uniform_counter_stream,
    validate_crystal_layout,
)

MASK = (1 << 64) - 1


def splitmix64_reference(seed, count):
    """Scalar splitmix64 from the published constants, as an oracle."""
    out = []
    state = seed
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        z ^= z >> 31
        out.append(z)
    return out


# ------------------------------------------------------------- counter RNG


def test_stream_matches_published_seed0_vectors():
    # First three outputs of splitmix64 from seed 0.
    expected_bits = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    got = uniform_counter_stream(0, 3)
    want = [(b >> 11) * 2.0**-53 for b in expected_bits]
    np.testing.assert_array_equal(got, want)


def test_stream_matches_scalar_reference_any_seed():
    seed = 123456789
    bits = splitmix64_reference(seed, 40)
    want = np.array([(b >> 11) * 2.0**-53 for b in bits])
    np.testing.assert_array_equal(uniform_counter_stream(seed, 40), want)


def test_stream_offset_is_pure_indexing():
    whole = uniform_counter_stream(7, 20)
    np.testing.assert_array_equal(uniform_counter_stream(7, 12, offset=8), whole[8:])


def test_stream_values_in_unit_interval():
    u = uniform_counter_stream(3, 10_000)
    assert np.all((0.0 <= u) & (u < 1.0))
    # Crude uniformity sanity check, not a statistical test.
    assert abs(np.mean(u) - 0.5) < 0.01


def test_field_is_row_major_affine_map_of_stream():
    field = seeded_random_field(42, 0.05, (6, 5))
    flat = uniform_counter_stream(42, 30)
    np.testing.assert_array_equal(field, (0.05 * (2.0 * flat - 1.0)).reshape(6, 5))


def test_field_bitwise_reproducible_and_bounded():
    a = seeded_random_field(9, 0.05, (32, 32))
    b = seeded_random_field(9, 0.05, (32, 32))
    assert a.tobytes() == b.tobytes()
    assert np.max(np.abs(a)) <= 0.05
    assert not np.array_equal(a, seeded_random_field(10, 0.05, (32, 32)))


def test_field_rejects_bad_amplitude():
    with pytest.raises(ValueError, match="amplitude"):
        seeded_random_field(1, 0.0, (4, 4))


# ---------------------------------------------------------------- profiles


def test_named_profiles_cover_the_four_models():
    assert set(NAMED_PROFILES) == {"ac_waves", "ch_cosines", "mbe_sines", "pfc_stripe"}


def test_profile_values_at_sample_points():
    X = np.array([[np.pi / 4.0]])
    Y = np.array([[0.0]])
    assert analytic_profile("ac_waves", X, Y)[0, 0] == pytest.approx(1.0)
    assert analytic_profile("ch_cosines", 0.0 * X, Y)[0, 0] == pytest.approx(0.2)
    assert analytic_profile("pfc_stripe", np.array([[8.0]]), np.array([[0.0]]))[
        0, 0
    ] == pytest.approx(1.0)


def test_unknown_profile_suggestion_free_error():
    with pytest.raises(ConfigError, match="unknown initial profile"):
        analytic_profile("ac_wave", np.zeros((2, 2)), np.zeros((2, 2)))


# ------------------------------------------------------------ crystallites


def test_block_center_value_alpha_zero():
    # At the local origin the lattice reads 0.285 + 0.446*(1 - 0.5).
    X = np.array([[50.0]])
    Y = np.array([[50.0]])
    field = crystallite_field(X, Y, [(50.0, 50.0)], [0.0], (0.0, 100.0))
    assert field[0, 0] == pytest.approx(0.508)


def test_background_outside_blocks():
    x = np.linspace(0.0, 200.0, 41)
    X, Y = np.meshgrid(x, x, indexing="ij")
    field = crystallite_field(X, Y, [(100.0, 100.0)], [0.3], (0.0, 200.0))
    outside = (np.abs(X - 100.0) > BLOCK_LENGTH / 2) | (
        np.abs(Y - 100.0) > BLOCK_LENGTH / 2
    )
    assert np.all(field[outside] == 0.285)
    assert np.any(field[~outside] != 0.285)


def test_rotation_by_quarter_turn_swaps_coordinates():
    # The lattice profile is even in its second argument, so the alpha=0
    # and alpha=pi/2 patches agree after swapping local offsets.
    x = np.linspace(80.0, 120.0, 33)
    X, Y = np.meshgrid(x, x, indexing="ij")
    f0 = crystallite_field(X, Y, [(100.0, 100.0)], [0.0], (0.0, 200.0))
    f90 = crystallite_field(X, Y, [(100.0, 100.0)], [np.pi / 2.0], (0.0, 200.0))
    np.testing.assert_allclose(f90, f0.T, atol=1e-12)


def test_layout_count_mismatch():
    problems = validate_crystal_layout([(50.0, 50.0)], [0.0, 0.1], (0.0, 100.0))
    assert any("orientation angles" in p for p in problems)


def test_layout_block_must_fit():
    problems = validate_crystal_layout([(15.0, 50.0)], [0.0], (0.0, 100.0))
    assert any("does not fit" in p for p in problems)


def test_layout_overlap_is_strict():
    # Centers exactly BLOCK_LENGTH apart touch but do not overlap.
    ok = validate_crystal_layout(
        [(50.0, 50.0), (50.0 + BLOCK_LENGTH, 50.0)], [0.0, 0.0], (0.0, 200.0)
    )
    assert ok == []
    bad = validate_crystal_layout(
        [(50.0, 50.0), (89.0, 50.0)], [0.0, 0.0], (0.0, 200.0)
    )
    assert any("overlap" in p for p in bad)


def test_field_raises_on_bad_layout():
    X, Y = np.meshgrid(np.arange(4.0), np.arange(4.0), indexing="ij")
    with pytest.raises(ConfigError, match="does not fit"):
        crystallite_field(X, Y, [(1.0, 1.0)], [0.0], (0.0, 10.0))
