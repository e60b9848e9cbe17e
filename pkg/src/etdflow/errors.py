"""Exception types raised by the solvers and the run harness."""


class SolverError(RuntimeError):
    """Base class for failures inside a time step."""


class PicardDivergedError(SolverError):
    """Picard iteration residual grew for several consecutive sweeps."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []


class NewtonFailedError(SolverError):
    """Scalar Newton solve for the renormalization factor did not converge."""


class RNearZeroError(SolverError):
    """Renormalization factor collapsed below the |R| guard threshold."""


class NonFiniteFieldError(SolverError):
    """A field became non-finite; the message names the offending stage."""

    def __init__(self, stage):
        super().__init__(f"non-finite values produced in stage '{stage}'")
        self.stage = stage


class HermitianSymmetryError(ValueError):
    """Inverse transform input violated conjugate symmetry beyond tolerance."""


class ConfigError(ValueError):
    """Invalid run configuration; collects every problem found."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class SnapshotFormatError(ValueError):
    """Snapshot payload and sidecar metadata disagree or are corrupted."""
