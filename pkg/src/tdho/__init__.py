"""Propagator and wavepacket evolution for the harmonic oscillator with a
time-dependent (possibly rapidly varying) frequency.

The pipeline: a frequency profile omega(t) feeds the amplitude equation,
whose mode f = A e^{i theta} yields structure functions and a real
fundamental pair (u, v); from those the closed-form propagator
<q, t | q0, t0> is evaluated, applied to wavefunctions by quadrature,
and cross-checked against direct classical integration, a Crank-Nicolson
Schroedinger solver, and the Pinney amplitude-phase system.
"""

from .amplitude import AmplitudeTrajectory, classical_oracle, mode, solve_amplitude
from .ermakov import ErmakovSolution, from_mode, gamma_residual, pinney_residual
from .errors import (
    AliasingWarning,
    BreakpointAmbiguityError,
    CausticError,
    ConfigError,
    DegenerateModeError,
    GridMismatchError,
    NumericalError,
    ProfileConstructionError,
    ProfileDomainError,
    StiffnessError,
    SupportError,
    ValidationError,
)
from .evolution import (
    WavefunctionGrid,
    apply_kernel,
    crank_nicolson_evolve,
    fidelity,
    gaussian_state,
    l2_error,
)
from .integrator import IntegrationStats, OdeSolution, integrate
from .profiles import AdmissibilityReport, FrequencyProfile
from .propagator import (
    DeltaFamilyReport,
    PropagatorSample,
    delta_family_check,
    kernel,
    kernel_matrix,
    maslov_index,
    mehler_kernel,
)
from .structure import StructureFunctions, build

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "AliasingWarning",
    "AmplitudeTrajectory",
    "BreakpointAmbiguityError",
    "CausticError",
    "ConfigError",
    "DegenerateModeError",
    "DeltaFamilyReport",
    "ErmakovSolution",
    "FrequencyProfile",
    "GridMismatchError",
    "IntegrationStats",
    "NumericalError",
    "OdeSolution",
    "ProfileConstructionError",
    "ProfileDomainError",
    "PropagatorSample",
    "StiffnessError",
    "StructureFunctions",
    "SupportError",
    "ValidationError",
    "WavefunctionGrid",
    "apply_kernel",
    "build",
    "classical_oracle",
    "crank_nicolson_evolve",
    "delta_family_check",
    "fidelity",
    "from_mode",
    "gamma_residual",
    "gaussian_state",
    "integrate",
    "kernel",
    "kernel_matrix",
    "l2_error",
    "maslov_index",
    "mehler_kernel",
    "mode",
    "pinney_residual",
    "solve_amplitude",
    "__version__",
]
