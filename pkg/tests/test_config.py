"""Config parsing: strict validation, defaults, overrides, round trips."""

import numpy as np
import pytest

from etdflow.config import (
    apply_overrides,
    parse_config_text,
    serialize_config,
    validate_config,
)
from etdflow.errors import ConfigError

TWO_PI = 2.0 * np.pi

MINIMAL_AC = """
model:
  kind: ac
backend:
  modes: 32
  domain: [0.0, 6.283185307179586]
time:
  t_end: 0.5
  dt: 0.1
initial:
  type: profile
  name: ac_waves
"""


def minimal_data():
    return {
        "model": {"kind": "ac"},
        "backend": {"modes": 32, "domain": [0.0, TWO_PI]},
        "time": {"t_end": 0.5, "dt": 0.1},
        "initial": {"type": "profile", "name": "ac_waves"},
    }


# ------------------------------------------------------------- happy path


def test_minimal_config_fills_documented_defaults():
    cfg = parse_config_text(MINIMAL_AC)
    assert cfg.order == 2
    assert cfg.picard_tol == 1e-7
    assert cfg.max_picard == 100
    assert cfg.bootstrap_substeps == 1
    assert cfg.estimator == "energy"
    assert cfg.out_dir == "."
    assert cfg.snapshot_times == ()
    assert cfg.seed == 0
    # Unset model parameters fall through to the model's own defaults.
    model = cfg.build_model()
    assert model.s == 2.0
    assert model.theta == 1e4


def test_order_index_is_r():
    for order, r in ((1, 0), (2, 1), (3, 2)):
        cfg = validate_config({**minimal_data(), "scheme": {"order": order}})
        assert cfg.order_index == r


def test_legendre_kind_selects_neumann_backend():
    data = minimal_data()
    data["model"] = {"kind": "ch", "eps_sq": 2.5e-3}
    data["backend"] = {"modes": 16, "domain": [-1.0, 1.0]}
    cfg = validate_config(data)
    assert cfg.uses_legendre
    backend = cfg.build_backend()
    assert backend.n_poly == 16
    # Initial data lives on the (N+1)^2 Gauss-Lobatto grid.
    data["initial"] = {"type": "constant", "value": 0.3}
    cfg = validate_config(data)
    phi0 = cfg.build_initial()
    assert phi0.shape == (17, 17)
    assert np.all(phi0 == 0.3)


def test_periodic_backend_and_profile_initial():
    cfg = validate_config(minimal_data())
    assert not cfg.uses_legendre
    grid = cfg.build_backend()
    phi0 = cfg.build_initial(grid)
    X, Y = grid.nodes()
    np.testing.assert_allclose(phi0, np.sin(2 * X) * np.cos(3 * Y))


def test_random_initial_uses_seed():
    data = minimal_data()
    data["initial"] = {"type": "random", "amplitude": 0.05}
    data["seed"] = 11
    cfg = validate_config(data)
    a = cfg.build_initial()
    b = validate_config(data).build_initial()
    np.testing.assert_array_equal(a, b)
    assert np.max(np.absolute(a)) <= 0.05
    data["seed"] = 12
    assert not np.array_equal(validate_config(data).build_initial(), a)


def test_crystallite_initial_builds():
    data = minimal_data()
    data["model"] = {"kind": "pfc", "delta": 0.25, "s": 0.25}
    data["backend"] = {"modes": 64, "domain": [0.0, 120.0]}
    data["initial"] = {
        "type": "crystallites",
        "centers": [[30.0, 60.0], [90.0, 60.0]],
        "angles": [0.0, 0.7853981633974483],
    }
    cfg = validate_config(data)
    field = cfg.build_initial()
    assert field.shape == (64, 64)
    # Background value away from both blocks.
    assert field[0, 0] == pytest.approx(0.285)


def test_adaptive_time_section():
    data = minimal_data()
    data["time"] = {
        "t_end": 1.0,
        "adaptive": {"dt_min": 1e-4, "dt_max": 0.1, "gamma_adp": 1e5},
        "estimator": "modified",
    }
    cfg = validate_config(data)
    assert cfg.dt is None
    assert cfg.adaptive.dt_max == 0.1
    assert cfg.estimator == "modified"


def test_convergence_section_parsed():
    data = minimal_data()
    data["convergence"] = {"taus": [0.1, 0.05, 0.025], "ref_dt": 1e-3}
    cfg = validate_config(data)
    assert cfg.convergence == {
        "taus": [0.1, 0.05, 0.025],
        "ref_dt": 1e-3,
        "ref_order": 3,
    }


# ------------------------------------------------------------ round trips


def test_serialize_parse_round_trip_is_identity():
    data = minimal_data()
    data["time"] = {
        "t_end": 2.0,
        "adaptive": {"dt_min": 1e-4, "dt_max": 0.1, "gamma_adp": 1e5},
    }
    data["scheme"] = {"order": 3, "picard_tol": 1e-10}
    data["output"] = {"directory": "runs/x", "snapshot_times": [0.5, 0.1]}
    data["convergence"] = {"taus": [0.1, 0.05, 0.025], "ref_dt": 1e-3}
    cfg = validate_config(data)
    text = serialize_config(cfg)
    again = parse_config_text(text)
    assert again == cfg
    assert serialize_config(again) == text


def test_snapshot_times_sorted_on_parse():
    data = minimal_data()
    data["output"] = {"snapshot_times": [0.4, 0.1, 0.2]}
    cfg = validate_config(data)
    assert cfg.snapshot_times == (0.1, 0.2, 0.4)


# -------------------------------------------------------------- overrides


def test_overrides_update_sections():
    data = minimal_data()
    out = apply_overrides(data, seed=5, out="elsewhere", order=3, theta=7.0)
    cfg = validate_config(out)
    assert cfg.seed == 5
    assert cfg.out_dir == "elsewhere"
    assert cfg.order == 3
    assert cfg.model_params["theta"] == 7.0


def test_dt_override_disables_adaptive():
    data = minimal_data()
    data["time"] = {
        "t_end": 1.0,
        "adaptive": {"dt_min": 1e-4, "dt_max": 0.1, "gamma_adp": 1e5},
    }
    cfg = validate_config(apply_overrides(data, dt=0.02))
    assert cfg.dt == 0.02
    assert cfg.adaptive is None


# ------------------------------------------------------------- rejections


def problems_of(data):
    with pytest.raises(ConfigError) as err:
        validate_config(data)
    return err.value.problems


def test_collect_all_reports_every_problem_at_once():
    data = {
        "model": {"kind": "pfc", "sigma": 1.0, "delta": 2.0},
        "backend": {"modes": 33, "domain": [0.0, 32.0]},
        "time": {"t_end": 1.0},
        "scheme": {"ordre": 2},
        "initial": {"type": "profile", "name": "pfc_stripes"},
    }
    problems = problems_of(data)
    joined = "\n".join(problems)
    assert len(problems) == 5
    assert "0 < delta < sigma^2" in joined
    assert "even count" in joined
    assert "exactly one of 'dt' and 'adaptive'" in joined
    assert "did you mean 'order'" in joined
    assert "did you mean 'pfc_stripe'" in joined


def test_unknown_top_level_key_suggestion():
    data = minimal_data()
    data["schem"] = {}
    assert any("did you mean 'scheme'" in p for p in problems_of(data))


def test_unknown_model_parameter_rejected():
    data = minimal_data()
    data["model"] = {"kind": "ac", "sigma": 1.0}
    assert any("not a parameter of model 'ac'" in p for p in problems_of(data))


def test_both_dt_and_adaptive_rejected():
    data = minimal_data()
    data["time"] = {
        "t_end": 1.0,
        "dt": 0.1,
        "adaptive": {"dt_min": 1e-4, "dt_max": 0.1, "gamma_adp": 1.0},
    }
    assert any("exactly one of" in p for p in problems_of(data))


def test_random_initial_requires_explicit_seed():
    data = minimal_data()
    data["initial"] = {"type": "random", "amplitude": 0.05}
    assert any("seed: required" in p for p in problems_of(data))


def test_periodic_domain_must_start_at_zero():
    data = minimal_data()
    data["backend"]["domain"] = [-1.0, 1.0]
    assert any("must start at 0" in p for p in problems_of(data))


def test_negative_theta_rejected():
    data = minimal_data()
    data["model"] = {"kind": "ac", "theta": -1.0}
    assert any("theta" in p for p in problems_of(data))


def test_crystallite_layout_errors_surface_in_config():
    data = minimal_data()
    data["backend"] = {"modes": 64, "domain": [0.0, 100.0]}
    data["initial"] = {
        "type": "crystallites",
        "centers": [[30.0, 50.0], [50.0, 50.0]],
        "angles": [0.0],
    }
    problems = problems_of(data)
    joined = "\n".join(problems)
    assert "overlap" in joined
    assert "orientation angles" in joined


def test_convergence_ladder_must_decrease():
    data = minimal_data()
    data["convergence"] = {"taus": [0.1, 0.1, 0.05], "ref_dt": 1e-3}
    assert any("strictly decreasing" in p for p in problems_of(data))


def test_convergence_reference_must_undercut_ladder():
    data = minimal_data()
    data["convergence"] = {"taus": [0.1, 0.05, 0.025], "ref_dt": 0.025}
    assert any("below min(taus)" in p for p in problems_of(data))


def test_parse_rejects_non_mapping_and_empty_text():
    with pytest.raises(ConfigError, match="empty"):
        parse_config_text("")
    with pytest.raises(ConfigError, match="mapping"):
        parse_config_text("- 1\n- 2\n")


def test_yaml_scientific_notation_needs_sign():
    # PyYAML reads bare '1.0e4' as a string; the validator rejects it
    # rather than guessing.
    text = MINIMAL_AC + "scheme:\n  picard_tol: 1.0e4\n"
    with pytest.raises(ConfigError, match="picard_tol"):
        parse_config_text(text)
    cfg = parse_config_text(MINIMAL_AC + "scheme:\n  picard_tol: 1.0e+4\n")
    assert cfg.picard_tol == 1e4
