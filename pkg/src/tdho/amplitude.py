"""Oscillatory modes of q'' + omega^2(t) q = 0 via the amplitude equation.

Writing a solution as f(t) = A(t) * exp(+i theta(t)) with
theta(t) = int_{t0}^t omega, f solves the oscillator equation exactly
when the complex amplitude satisfies

    A'' + 2 i omega(t) A' + i omega_dot(t) A = 0.

This module integrates that equation (as a first-order complex system in
(A, A')), exposes the assembled mode f and its derivative, and provides
direct integration of the oscillator equation itself as an independent
cross-check oracle.

The default initial data A(t0) = 1, A'(t0) = 0 makes f a pure
positive-frequency mode at t0 (f = 1, f' = i omega0), which reproduces
the textbook constant-frequency solution and keeps the conserved
Wronskian-like quantity C(t0) = 2 i omega0 away from zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModeError, ProfileDomainError
from .integrator import OdeSolution, integrate
from .profiles import FrequencyProfile

__all__ = ["AmplitudeTrajectory", "solve_amplitude", "mode", "classical_oracle"]


@dataclass(frozen=True)
class AmplitudeTrajectory:
    """Dense-output solution (A, A') of the amplitude equation."""

    profile: FrequencyProfile
    t0: float
    t1: float
    A0: complex
    Adot0: complex
    solution: OdeSolution
    rel_tol: float
    abs_tol: float

    @property
    def omega0(self) -> float:
        return self.profile.omega(self.t0)

    def A(self, t):
        out = self.solution(t)
        return out[..., 0] if np.ndim(t) else out[0]

    def Adot(self, t):
        out = self.solution(t)
        return out[..., 1] if np.ndim(t) else out[1]

    def theta(self, t):
        return self.profile.phase_integral(self.t0, t)

    def mode(self, t):
        """The assembled solution pair (f, f') with f = A e^{i theta}."""
        state = self.solution(t)
        a, adot = (state[..., 0], state[..., 1]) if np.ndim(t) else (state[0], state[1])
        phase = np.exp(1j * self.theta(t))
        w = self.profile.omega(t)
        return a * phase, (adot + 1j * w * a) * phase


def _span_in_domain(profile, t0, t1):
    if not t1 > t0:
        raise ValueError("need t1 > t0")
    eps = 1e-12 * (profile.t_max - profile.t_min)
    if t0 < profile.t_min - eps or t1 > profile.t_max + eps:
        raise ProfileDomainError(
            f"span [{t0:.6g}, {t1:.6g}] not inside profile domain "
            f"[{profile.t_min:.6g}, {profile.t_max:.6g}]")


def solve_amplitude(profile: FrequencyProfile, t0: float, t1: float,
                    A0: complex = 1.0, Adot0: complex = 0.0,
                    rel_tol: float = 1e-10, abs_tol: float = 1e-12
                    ) -> AmplitudeTrajectory:
    """Integrate the amplitude equation on [t0, t1].

    Breakpoints of the profile are forced to be step endpoints. The pair
    (A0, Adot0) = (0, 0) is rejected: it would give the zero mode.
    """
    t0, t1 = float(t0), float(t1)
    _span_in_domain(profile, t0, t1)
    A0, Adot0 = complex(A0), complex(Adot0)
    if A0 == 0 and Adot0 == 0:
        raise DegenerateModeError("initial data (A0, Adot0) = (0, 0) is degenerate")

    def rhs(t, y):
        w = profile._omega_raw(t)
        # segments are right-continuous in omega_dot at declared breakpoints;
        # all built-in kinds (incl. PCHIP tables) are C^1 so the limits agree
        wd = profile._omega_dot_raw(t)
        return np.array([y[1], -2j * w * y[1] - 1j * wd * y[0]])

    sol = integrate(rhs, [A0, Adot0], (t0, t1), rel_tol=rel_tol, abs_tol=abs_tol,
                    events=profile.breakpoints)
    return AmplitudeTrajectory(profile, t0, t1, A0, Adot0, sol, rel_tol, abs_tol)


def mode(traj: AmplitudeTrajectory, t):
    """Module-level alias for :meth:`AmplitudeTrajectory.mode`."""
    return traj.mode(t)


def classical_oracle(profile: FrequencyProfile, t0: float, t1: float,
                     q0, qdot0, rel_tol: float = 1e-10, abs_tol: float = 1e-12
                     ) -> OdeSolution:
    """Directly integrate q'' = -omega^2(t) q; verification oracle only."""
    t0, t1 = float(t0), float(t1)
    _span_in_domain(profile, t0, t1)

    def rhs(t, y):
        w = profile._omega_raw(t)
        return np.array([y[1], -(w * w) * y[0]])

    return integrate(rhs, [q0, qdot0], (t0, t1), rel_tol=rel_tol, abs_tol=abs_tol,
                     events=profile.breakpoints)
