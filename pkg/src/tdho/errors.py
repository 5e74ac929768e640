"""Exception and warning types shared across the package.

Errors fall into two families that the CLI maps onto exit codes:
validation problems (bad input, exit 1) and numerical failures
(caustics, stiffness, exit 2).
"""


class ValidationError(ValueError):
    """Bad user input: malformed config, out-of-range parameter, grid mismatch."""


class ConfigError(ValidationError):
    """Config file failed to parse or validate; message names the offending key."""


class ProfileDomainError(ValidationError):
    """Time outside the frequency profile's domain."""


class ProfileConstructionError(ValidationError):
    """Frequency law rejected at construction (e.g. omega <= 0 somewhere)."""


class BreakpointAmbiguityError(ValidationError):
    """Two-sided derivative requested exactly at a declared breakpoint."""


class DegenerateModeError(ValidationError):
    """Zero initial amplitude data, or vanishing Wronskian C(t0)."""


class GridMismatchError(ValidationError):
    """Operands live on different spatial grids or physical parameters."""


class SupportError(ValidationError):
    """State support violates grid margins (non-negligible edge amplitude)."""


class NumericalError(RuntimeError):
    """Base class for runtime numerical failures (exit code 2)."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class StiffnessError(NumericalError):
    """Adaptive step size underflowed; carries the failure time."""


class CausticError(NumericalError):
    """Kernel requested at (or too close to) a zero of u(t).

    ``nearest_caustic`` holds the closest detected caustic time, when known.
    """

    def __init__(self, message: str, t: float | None = None,
                 nearest_caustic: float | None = None):
        super().__init__(message, t)
        self.nearest_caustic = nearest_caustic


class AliasingWarning(UserWarning):
    """Quadrature grid too coarse for the kernel's local phase oscillation."""
