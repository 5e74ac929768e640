"""Structure functions of the mode and the classical objects built from them.

From a mode f = A e^{i theta} with initial data (A0, A0') the package

    F0(t) = A0 conj(f(t)) - conj(A0) f(t)
    F1(t) = conj(f'(t0)) f(t) - f'(t0) conj(f(t))
    C(t)  = conj(A) A' - A conj(A') + 2 i omega |A|^2

C equals conj(f) f' - f conj(f') and is conserved; its drift along a
trajectory is the package's primary integration-quality gauge. The
normalized basis pair

    u(t) = -F0(t) / C(t0),     v(t) = -F1(t) / C(t0)

is real and solves the classical oscillator equation with
u(t0) = 0, u'(t0) = 1, v(t0) = 1, v'(t0) = 0, so

    q(t) = v q0 + u p0 / m,    p(t) = m (v' q0 + u' p0 / m)

is the classical flow and

    S(q, q0, t) = m / (2 u) * (u' q^2 + v q0^2 - 2 q q0)

its generating (classical) action. The minus sign in u, v makes the
initial condition come out as q(t0) = q0 rather than -q0; the raw F0,
F1, C remain accessible. The action uses the Mehler-consistent -2*q*q0
cross term, which reproduces the exact constant-frequency propagator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .amplitude import AmplitudeTrajectory
from .errors import CausticError, DegenerateModeError
from .profiles import FrequencyProfile

__all__ = ["StructureFunctions", "build"]


@dataclass(frozen=True)
class StructureFunctions:
    """Accessors for F0, F1, C and the normalized real basis (u, v)."""

    traj: AmplitudeTrajectory
    m: float
    hbar: float
    eps_caustic: float
    C0: complex = field(init=False)

    def __post_init__(self):
        if self.m <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")
        A0, Adot0 = self.traj.A0, self.traj.Adot0
        w0 = self.traj.omega0
        C0 = (np.conj(A0) * Adot0 - A0 * np.conj(Adot0)
              + 2j * w0 * abs(A0) ** 2)
        scale = abs(A0) ** 2 * w0 + abs(A0) * abs(Adot0) + abs(Adot0) ** 2 / max(w0, 1e-300)
        if abs(C0) <= 1e-12 * max(scale, 1e-300):
            raise DegenerateModeError(
                "C(t0) vanishes for this initial data; the mode pair is degenerate")
        object.__setattr__(self, "C0", complex(C0))

    # -- raw structure functions -------------------------------------------

    @property
    def profile(self) -> FrequencyProfile:
        return self.traj.profile

    @property
    def t0(self) -> float:
        return self.traj.t0

    @property
    def t1(self) -> float:
        return self.traj.t1

    def F0(self, t):
        f, _ = self.traj.mode(t)
        return self.traj.A0 * np.conj(f) - np.conj(self.traj.A0) * f

    def F1(self, t):
        f, _ = self.traj.mode(t)
        fd0 = self.traj.Adot0 + 1j * self.traj.omega0 * self.traj.A0
        return np.conj(fd0) * f - fd0 * np.conj(f)

    def F0_dot(self, t):
        _, fdot = self.traj.mode(t)
        return self.traj.A0 * np.conj(fdot) - np.conj(self.traj.A0) * fdot

    def F1_dot(self, t):
        _, fdot = self.traj.mode(t)
        fd0 = self.traj.Adot0 + 1j * self.traj.omega0 * self.traj.A0
        return np.conj(fd0) * fdot - fd0 * np.conj(fdot)

    def C(self, t):
        """Conserved combination evaluated from the trajectory at time t."""
        a = self.traj.A(t)
        adot = self.traj.Adot(t)
        w = self.traj.profile.omega(t)
        return np.conj(a) * adot - a * np.conj(adot) + 2j * w * np.abs(a) ** 2

    # -- normalized real basis ----------------------------------------------

    def u(self, t):
        return (-self.F0(t) / self.C0).real

    def v(self, t):
        return (-self.F1(t) / self.C0).real

    def udot(self, t):
        return (-self.F0_dot(t) / self.C0).real

    def vdot(self, t):
        return (-self.F1_dot(t) / self.C0).real

    # -- classical mechanics -------------------------------------------------

    def classical_trajectory(self, q0: float, p0: float, t):
        """Map initial (q0, p0) to (q, p) at time t."""
        q = self.v(t) * q0 + self.u(t) * p0 / self.m
        p = self.m * (self.vdot(t) * q0 + self.udot(t) * p0 / self.m)
        return q, p

    def commutator_coefficient(self, t):
        """Coefficient of [q(t0), q(t)]: i hbar F0(t) / (m C(t))."""
        return 1j * self.hbar * self.F0(t) / (self.m * self.C(t))

    def classical_action(self, q: float, q0: float, t) -> float:
        """S(q, q0, t) = m/(2u) (u' q^2 + v q0^2 - 2 q q0); errors at caustics."""
        u = self.u(t)
        if np.any(np.abs(u) <= self.eps_caustic):
            tbad = float(np.atleast_1d(t)[np.argmin(np.abs(np.atleast_1d(u)))])
            raise CausticError(
                f"classical action undefined at t = {tbad:.9g}: u = {np.min(np.abs(u)):.3g}",
                t=tbad, nearest_caustic=self.nearest_caustic(tbad))
        return self.m / (2.0 * u) * (self.udot(t) * q ** 2 + self.v(t) * q0 ** 2
                                     - 2.0 * q * q0)

    # -- caustics ------------------------------------------------------------

    @cached_property
    def caustic_times(self) -> np.ndarray:
        """Zeros of u on (t0, t1], located by sign-change scan + bisection.

        Consecutive zeros of a solution of the oscillator equation are at
        least pi/omega_max apart (Sturm), so a mesh a quarter of that gap
        cannot skip a pair of them; tangential zeros are impossible because
        (u, u') never vanish together (unit Wronskian).
        """
        w_max = self.profile.omega_max(self.t0, self.t1)
        gap = np.pi / w_max
        n = max(16, int(np.ceil(4.0 * (self.t1 - self.t0) / gap)) + 1)
        mesh = np.linspace(self.t0, self.t1, n)
        uu = self.u(mesh)
        sign = np.sign(uu)
        sign[0] = 1.0  # u(t0) = 0 with u'(t0) = 1: treat the initial zero as +
        zeros = []
        for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
            zeros.append(brentq(lambda x: self.u(x), mesh[i], mesh[i + 1],
                                xtol=1e-14, rtol=1e-15))
        for i in np.flatnonzero(sign == 0):
            zeros.append(float(mesh[i]))
        return np.asarray(sorted(zeros))

    def nearest_caustic(self, t) -> float | None:
        zs = self.caustic_times
        if zs.size == 0:
            return None
        return float(zs[np.argmin(np.abs(zs - t))])


def build(traj: AmplitudeTrajectory, m: float = 1.0, hbar: float = 1.0,
          eps_caustic: float = 1e-8) -> StructureFunctions:
    """Assemble structure-function accessors from an amplitude trajectory."""
    return StructureFunctions(traj, float(m), float(hbar), float(eps_caustic))
