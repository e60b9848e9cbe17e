"""Run configuration: YAML parsing, strict validation, canonical output.

Validation is collect-all: every problem found is reported in one
:class:`~etdflow.errors.ConfigError`, and unknown keys come with a
nearest-match suggestion.  ``serialize_config`` emits a canonical
(sorted-key) document so that parse -> serialize -> parse is idempotent.
"""

from __future__ import annotations

import difflib
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .adaptive import AdaptiveParams
from .errors import ConfigError
from .fourier import PeriodicGrid
from .initial import (
    NAMED_PROFILES,
    analytic_profile,
    crystallite_field,
    seeded_random_field,
    validate_crystal_layout,
)
from .legendre import NeumannBasis
from .models import MODEL_KINDS, build_model

_TOP_KEYS = {"model", "backend", "time", "scheme", "initial", "output",
             "convergence", "seed"}
_SECTION_KEYS = {
    "model": {"kind", "eps_sq", "sigma", "delta", "s", "theta"},
    "backend": {"modes", "domain"},
    "time": {"t_end", "dt", "adaptive", "estimator"},
    "scheme": {"order", "picard_tol", "max_picard", "bootstrap_substeps"},
    "initial": {"type", "name", "amplitude", "value", "centers", "angles"},
    "output": {"directory", "snapshot_times"},
    "convergence": {"taus", "ref_dt", "ref_order", "ref_picard_tol"},
}
_ADAPTIVE_KEYS = {"dt_min", "dt_max", "gamma_adp"}
_MODEL_PARAM_KEYS = {
    "ac": {"eps_sq", "s", "theta"},
    "ch": {"eps_sq", "s", "theta"},
    "ch_periodic": {"eps_sq", "s", "theta"},
    "mbe_slope": {"eps_sq", "s", "theta"},
    "mbe_noslope": {"eps_sq", "s", "theta"},
    "pfc": {"sigma", "delta", "s", "theta"},
}
_INITIAL_TYPES = {"profile", "random", "constant", "crystallites"}
_ESTIMATORS = {"energy", "modified"}

_LEGENDRE_KINDS = {"ch"}


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _is_int(value):
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


def _suggest(key, allowed):
    match = difflib.get_close_matches(str(key), sorted(allowed), n=1)
    return f" (did you mean '{match[0]}'?)" if match else ""


def _check_unknown(mapping, allowed, where, problems):
    for key in mapping:
        if key not in allowed:
            problems.append(f"{where}: unknown key '{key}'{_suggest(key, allowed)}")


@dataclass(frozen=True)
class RunConfig:
    """Validated run description; ``order`` is the user-facing 1/2/3."""

    model_kind: str
    model_params: dict
    modes: int
    domain: tuple
    t_end: float
    dt: float | None
    adaptive: AdaptiveParams | None
    estimator: str
    order: int
    picard_tol: float
    max_picard: int
    bootstrap_substeps: int
    initial: dict
    out_dir: str
    snapshot_times: tuple
    convergence: dict | None
    seed: int

    @property
    def order_index(self):
        """Multistep index r = order - 1 consumed by the integrator."""
        return self.order - 1

    @property
    def uses_legendre(self):
        return self.model_kind in _LEGENDRE_KINDS

    def build_backend(self):
        if self.uses_legendre:
            return NeumannBasis(self.modes, self.domain)
        return PeriodicGrid(self.modes, self.domain[1] - self.domain[0])

    def build_model(self, backend=None):
        backend = backend if backend is not None else self.build_backend()
        return build_model(self.model_kind, backend, **self.model_params)

    def node_coordinates(self, backend):
        if self.uses_legendre:
            return np.meshgrid(backend.quad_nodes, backend.quad_nodes, indexing="ij")
        return backend.nodes()

    def build_initial(self, backend=None):
        backend = backend if backend is not None else self.build_backend()
        X, Y = self.node_coordinates(backend)
        kind = self.initial["type"]
        if kind == "profile":
            return analytic_profile(self.initial["name"], X, Y)
        if kind == "random":
            return seeded_random_field(self.seed, self.initial["amplitude"], X.shape)
        if kind == "constant":
            return np.full(X.shape, float(self.initial["value"]))
        return crystallite_field(
            X, Y, self.initial["centers"], self.initial["angles"], self.domain
        )

    def to_dict(self):
        """Plain nested dict; inverse of validation up to defaults."""
        data = {
            "model": {"kind": self.model_kind, **self.model_params},
            "backend": {"modes": self.modes, "domain": list(self.domain)},
            "time": {"t_end": self.t_end, "estimator": self.estimator},
            "scheme": {
                "order": self.order,
                "picard_tol": self.picard_tol,
                "max_picard": self.max_picard,
                "bootstrap_substeps": self.bootstrap_substeps,
            },
            "initial": dict(self.initial),
            "output": {
                "directory": self.out_dir,
                "snapshot_times": list(self.snapshot_times),
            },
            "seed": self.seed,
        }
        if self.dt is not None:
            data["time"]["dt"] = self.dt
        if self.adaptive is not None:
            data["time"]["adaptive"] = {
                "dt_min": self.adaptive.dt_min,
                "dt_max": self.adaptive.dt_max,
                "gamma_adp": self.adaptive.gamma_adp,
            }
        if self.convergence is not None:
            data["convergence"] = dict(self.convergence)
        return data


def _validate_model(data, problems):
    section = data.get("model")
    if not isinstance(section, dict):
        problems.append("model: section is required and must be a mapping")
        return None, {}
    _check_unknown(section, _SECTION_KEYS["model"], "model", problems)
    kind = section.get("kind")
    if kind not in MODEL_KINDS:
        known = ", ".join(sorted(MODEL_KINDS))
        problems.append(f"model.kind: expected one of {known}, got {kind!r}")
        return None, {}
    params = {}
    allowed = _MODEL_PARAM_KEYS[kind]
    for key, value in section.items():
        if key == "kind":
            continue
        if key not in allowed:
            problems.append(f"model.{key}: not a parameter of model '{kind}'")
            continue
        if not _is_number(value):
            problems.append(f"model.{key}: expected a number, got {value!r}")
            continue
        params[key] = float(value)
    if "eps_sq" in params and params["eps_sq"] <= 0.0:
        problems.append(f"model.eps_sq: must be positive, got {params['eps_sq']:g}")
    if "theta" in params and params["theta"] < 0.0:
        problems.append(f"model.theta: must be >= 0, got {params['theta']:g}")
    if kind == "pfc":
        sigma = params.get("sigma", 1.0)
        delta = params.get("delta", 0.025)
        if not (0.0 < delta < sigma * sigma):
            problems.append(
                f"model.delta: need 0 < delta < sigma^2 = {sigma * sigma:g}, "
                f"got {delta:g}"
            )
    return kind, params


def _validate_backend(data, kind, problems):
    section = data.get("backend")
    if not isinstance(section, dict):
        problems.append("backend: section is required and must be a mapping")
        return 0, (0.0, 1.0)
    _check_unknown(section, _SECTION_KEYS["backend"], "backend", problems)
    modes = section.get("modes")
    if not _is_int(modes) or modes < 8:
        problems.append(f"backend.modes: expected an integer >= 8, got {modes!r}")
        modes = 8
    elif kind not in _LEGENDRE_KINDS and modes % 2:
        problems.append(f"backend.modes: periodic grids need an even count, got {modes}")
    domain = section.get("domain")
    if (
        not isinstance(domain, (list, tuple))
        or len(domain) != 2
        or not all(_is_number(v) for v in domain)
        or not domain[0] < domain[1]
    ):
        problems.append(f"backend.domain: expected [a, b] with a < b, got {domain!r}")
        domain = (0.0, 1.0)
    else:
        domain = (float(domain[0]), float(domain[1]))
        if kind is not None and kind not in _LEGENDRE_KINDS and domain[0] != 0.0:
            problems.append(
                f"backend.domain: periodic domains must start at 0, got {domain[0]:g}"
            )
    return int(modes), domain


def _validate_time(data, problems):
    section = data.get("time")
    if not isinstance(section, dict):
        problems.append("time: section is required and must be a mapping")
        return 0.0, None, None, "energy"
    _check_unknown(section, _SECTION_KEYS["time"], "time", problems)
    t_end = section.get("t_end")
    if not _is_number(t_end) or t_end < 0.0 or not math.isfinite(t_end):
        problems.append(f"time.t_end: expected a finite number >= 0, got {t_end!r}")
        t_end = 0.0
    dt = section.get("dt")
    adaptive_raw = section.get("adaptive")
    adaptive = None
    if (dt is None) == (adaptive_raw is None):
        problems.append("time: exactly one of 'dt' and 'adaptive' must be given")
    if dt is not None and (not _is_number(dt) or dt <= 0.0):
        problems.append(f"time.dt: expected a positive number, got {dt!r}")
        dt = None
    if adaptive_raw is not None:
        if not isinstance(adaptive_raw, dict):
            problems.append("time.adaptive: must be a mapping")
        else:
            _check_unknown(adaptive_raw, _ADAPTIVE_KEYS, "time.adaptive", problems)
            vals = {}
            for key in _ADAPTIVE_KEYS:
                value = adaptive_raw.get(key)
                if not _is_number(value):
                    problems.append(f"time.adaptive.{key}: expected a number, got {value!r}")
                else:
                    vals[key] = float(value)
            if len(vals) == 3:
                try:
                    adaptive = AdaptiveParams(**vals)
                except ValueError as exc:
                    problems.append(f"time.adaptive: {exc}")
    estimator = section.get("estimator", "energy")
    if estimator not in _ESTIMATORS:
        problems.append(
            f"time.estimator: expected one of {sorted(_ESTIMATORS)}, got {estimator!r}"
        )
        estimator = "energy"
    return float(t_end), (float(dt) if dt is not None else None), adaptive, estimator


def _validate_scheme(data, problems):
    section = data.get("scheme", {})
    if not isinstance(section, dict):
        problems.append("scheme: must be a mapping")
        section = {}
    _check_unknown(section, _SECTION_KEYS["scheme"], "scheme", problems)
    order = section.get("order", 2)
    if order not in (1, 2, 3):
        problems.append(f"scheme.order: expected 1, 2, or 3, got {order!r}")
        order = 2
    picard_tol = section.get("picard_tol", 1e-7)
    if not _is_number(picard_tol) or picard_tol <= 0.0:
        problems.append(f"scheme.picard_tol: expected a positive number, got {picard_tol!r}")
        picard_tol = 1e-7
    max_picard = section.get("max_picard", 100)
    if not _is_int(max_picard) or max_picard < 1:
        problems.append(f"scheme.max_picard: expected an integer >= 1, got {max_picard!r}")
        max_picard = 100
    substeps = section.get("bootstrap_substeps", 1)
    if not _is_int(substeps) or substeps < 1:
        problems.append(
            f"scheme.bootstrap_substeps: expected an integer >= 1, got {substeps!r}"
        )
        substeps = 1
    return int(order), float(picard_tol), int(max_picard), int(substeps)


def _validate_initial(data, domain, problems):
    section = data.get("initial")
    if not isinstance(section, dict):
        problems.append("initial: section is required and must be a mapping")
        return {"type": "constant", "value": 0.0}
    _check_unknown(section, _SECTION_KEYS["initial"], "initial", problems)
    kind = section.get("type")
    if kind not in _INITIAL_TYPES:
        problems.append(
            f"initial.type: expected one of {sorted(_INITIAL_TYPES)}, got {kind!r}"
        )
        return {"type": "constant", "value": 0.0}
    out = {"type": kind}
    if kind == "profile":
        name = section.get("name")
        if name not in NAMED_PROFILES:
            problems.append(
                f"initial.name: unknown profile {name!r}"
                f"{_suggest(name, NAMED_PROFILES)}"
            )
        else:
            out["name"] = name
    elif kind == "random":
        amplitude = section.get("amplitude")
        if not _is_number(amplitude) or amplitude <= 0.0:
            problems.append(
                f"initial.amplitude: expected a positive number, got {amplitude!r}"
            )
        else:
            out["amplitude"] = float(amplitude)
    elif kind == "constant":
        value = section.get("value")
        if not _is_number(value):
            problems.append(f"initial.value: expected a number, got {value!r}")
        else:
            out["value"] = float(value)
    else:
        centers = section.get("centers")
        angles = section.get("angles")
        if not isinstance(centers, list) or not all(
            isinstance(c, (list, tuple)) and len(c) == 2 and all(_is_number(v) for v in c)
            for c in centers
        ):
            problems.append("initial.centers: expected a list of [x, y] pairs")
            centers = []
        if not isinstance(angles, list) or not all(_is_number(a) for a in angles):
            problems.append("initial.angles: expected a list of numbers")
            angles = []
        layout_problems = validate_crystal_layout(centers, angles, domain)
        problems.extend(f"initial: {p}" for p in layout_problems)
        out["centers"] = [[float(x), float(y)] for x, y in centers]
        out["angles"] = [float(a) for a in angles]
    return out


def _validate_output(data, problems):
    section = data.get("output", {})
    if not isinstance(section, dict):
        problems.append("output: must be a mapping")
        section = {}
    _check_unknown(section, _SECTION_KEYS["output"], "output", problems)
    directory = section.get("directory", ".")
    if not isinstance(directory, str) or not directory:
        problems.append(f"output.directory: expected a path string, got {directory!r}")
        directory = "."
    times = section.get("snapshot_times", [])
    if not isinstance(times, list) or not all(_is_number(t) and t >= 0 for t in times):
        problems.append("output.snapshot_times: expected a list of times >= 0")
        times = []
    return directory, tuple(sorted(float(t) for t in times))


def _validate_convergence(data, problems):
    section = data.get("convergence")
    if section is None:
        return None
    if not isinstance(section, dict):
        problems.append("convergence: must be a mapping")
        return None
    _check_unknown(section, _SECTION_KEYS["convergence"], "convergence", problems)
    taus = section.get("taus")
    if (
        not isinstance(taus, list)
        or len(taus) < 3
        or not all(_is_number(t) and t > 0 for t in taus)
        or any(b >= a for a, b in zip(taus, taus[1:]))
    ):
        problems.append(
            "convergence.taus: expected >= 3 strictly decreasing positive steps"
        )
        return None
    ref_dt = section.get("ref_dt")
    if not _is_number(ref_dt) or ref_dt <= 0 or ref_dt >= min(taus):
        problems.append(
            f"convergence.ref_dt: expected a positive step below min(taus), got {ref_dt!r}"
        )
        return None
    ref_order = section.get("ref_order", 3)
    if ref_order not in (1, 2, 3):
        problems.append(f"convergence.ref_order: expected 1, 2, or 3, got {ref_order!r}")
        return None
    ref_picard_tol = section.get("ref_picard_tol")
    if ref_picard_tol is not None and (
        not _is_number(ref_picard_tol) or not 0 < ref_picard_tol < 1
    ):
        problems.append(
            "convergence.ref_picard_tol: expected a tolerance in (0, 1), "
            f"got {ref_picard_tol!r}"
        )
        return None
    out = {
        "taus": [float(t) for t in taus],
        "ref_dt": float(ref_dt),
        "ref_order": int(ref_order),
    }
    if ref_picard_tol is not None:
        out["ref_picard_tol"] = float(ref_picard_tol)
    return out


def validate_config(data):
    """Validate a raw mapping; returns a RunConfig or raises ConfigError."""
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a mapping of sections")
    problems = []
    _check_unknown(data, _TOP_KEYS, "top level", problems)
    kind, params = _validate_model(data, problems)
    modes, domain = _validate_backend(data, kind, problems)
    t_end, dt, adaptive, estimator = _validate_time(data, problems)
    order, picard_tol, max_picard, substeps = _validate_scheme(data, problems)
    initial = _validate_initial(data, domain, problems)
    out_dir, snapshot_times = _validate_output(data, problems)
    convergence = _validate_convergence(data, problems)
    seed = data.get("seed", 0)
    if not _is_int(seed) or seed < 0:
        problems.append(f"seed: expected a nonnegative integer, got {seed!r}")
        seed = 0
    if initial.get("type") == "random" and "seed" not in data:
        problems.append("seed: required when initial.type is 'random'")
    if problems:
        raise ConfigError(problems)
    return RunConfig(
        model_kind=kind,
        model_params=params,
        modes=modes,
        domain=domain,
        t_end=t_end,
        dt=dt,
        adaptive=adaptive,
        estimator=estimator,
        order=order,
        picard_tol=picard_tol,
        max_picard=max_picard,
        bootstrap_substeps=substeps,
        initial=initial,
        out_dir=out_dir,
        snapshot_times=snapshot_times,
        convergence=convergence,
        seed=int(seed),
    )


def parse_config_text(text, source="<config>"):
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{source}: YAML parse error: {exc}") from exc
    if data is None:
        raise ConfigError(f"{source}: empty configuration")
    return validate_config(data)


def parse_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def apply_overrides(data, *, seed=None, out=None, order=None, theta=None, dt=None):
    """Apply CLI overrides onto a raw config mapping (before validation).

    ``--dt`` switches an adaptive config to fixed stepping.
    """
    if seed is not None:
        data["seed"] = seed
    if out is not None:
        data.setdefault("output", {})["directory"] = out
    if order is not None:
        data.setdefault("scheme", {})["order"] = order
    if theta is not None:
        data.setdefault("model", {})["theta"] = theta
    if dt is not None:
        time_section = data.setdefault("time", {})
        time_section["dt"] = dt
        time_section.pop("adaptive", None)
    return data


def serialize_config(config):
    """Canonical YAML for a validated config (sorted keys, plain style)."""
    return yaml.safe_dump(config.to_dict(), sort_keys=True, default_flow_style=False)
