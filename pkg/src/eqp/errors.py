"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A construction precondition or configuration value is invalid.

    ``key`` optionally names the offending configuration key path.
    """

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class NonZeroMeanError(ValidationError):
    """Input to the zero-mean inverse Laplacian has a nonzero average."""


class CFLViolation(ValidationError):
    """Requested time step exceeds the CFL cap for the initial velocity."""


class SolverAbort(RuntimeError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, step_index, t):
        super().__init__(f"non-finite vorticity at step {step_index} (t={t:.6g})")
        self.step_index = step_index
        self.t = t
