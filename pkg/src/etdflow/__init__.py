"""Renormalized exponential time differencing solvers for gradient flows."""

from etdflow.adaptive import AdaptiveParams, next_dt
from etdflow.config import (
    RunConfig,
    parse_config,
    parse_config_text,
    serialize_config,
    validate_config,
)
from etdflow.convergence import ConvergenceResult, self_convergence
from etdflow.errors import (
    ConfigError,
    HermitianSymmetryError,
    NewtonFailedError,
    NonFiniteFieldError,
    PicardDivergedError,
    RNearZeroError,
    SnapshotFormatError,
    SolverError,
)
from etdflow.etd import StepGeometry, alpha_coeffs, beta_coeffs, lagrange_weights, phi_base
from etdflow.fourier import PeriodicGrid
from etdflow.initial import (
    NAMED_PROFILES,
    analytic_profile,
    crystallite_field,
    seeded_random_field,
)
from etdflow.legendre import NeumannBasis
from etdflow.models import (
    MODEL_KINDS,
    AllenCahn,
    CahnHilliard,
    CahnHilliardPeriodic,
    DoubleWell,
    MbeNoSlopeSelection,
    MbeSlopeSelection,
    PhaseFieldCrystal,
    ZeroPotential,
    build_model,
)
from etdflow.presets import preset_config, preset_names
from etdflow.runio import (
    LedgerWriter,
    read_energy_ledger,
    read_snapshot,
    write_energy_ledger,
    write_snapshot,
)
from etdflow.solver import (
    EnergyLedgerRow,
    RunResult,
    SpectralState,
    StepHistory,
    run_flow,
    solve_r,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveParams",
    "AllenCahn",
    "CahnHilliard",
    "CahnHilliardPeriodic",
    "ConfigError",
    "ConvergenceResult",
    "DoubleWell",
    "EnergyLedgerRow",
    "HermitianSymmetryError",
    "LedgerWriter",
    "MODEL_KINDS",
    "MbeNoSlopeSelection",
    "MbeSlopeSelection",
    "NAMED_PROFILES",
    "NeumannBasis",
    "NewtonFailedError",
    "NonFiniteFieldError",
    "PeriodicGrid",
    "PhaseFieldCrystal",
    "PicardDivergedError",
    "RNearZeroError",
    "RunConfig",
    "RunResult",
    "SnapshotFormatError",
    "SolverError",
    "SpectralState",
    "StepGeometry",
    "StepHistory",
    "ZeroPotential",
    "alpha_coeffs",
    "analytic_profile",
    "beta_coeffs",
    "build_model",
    "crystallite_field",
    "lagrange_weights",
    "next_dt",
    "parse_config",
    "parse_config_text",
    "phi_base",
    "preset_config",
    "preset_names",
    "read_energy_ledger",
    "read_snapshot",
    "run_flow",
    "seeded_random_field",
    "self_convergence",
    "serialize_config",
    "solve_r",
    "step",
    "validate_config",
    "write_energy_ledger",
    "write_snapshot",
    "__version__",
]
