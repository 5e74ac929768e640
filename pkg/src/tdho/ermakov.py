"""Amplitude-phase (Ermakov) cross-check for the oscillator modes.

Any complex solution f of q'' + omega^2 q = 0 factorizes as
R(t) e^{i phi(t)} with R^2 phi' conserved. Rescaling S = R / sqrt(w),
w = Im(conj(f) f'), turns the envelope equation into the unit-coefficient
Pinney form

    S'' + omega^2 S = 1 / S^3,        gamma' = 1 / S^2,

and the phase obeys the third-order equation

    gamma' gamma''' - (3/2) gamma''^2 - 2 (omega^2 - gamma'^2) gamma'^2 = 0.

This module rebuilds (S, gamma) from an amplitude trajectory and
evaluates finite-difference residuals of both equations, giving an
independent consistency gauge for the mode construction. gamma is
defined through its first integral 1/S^2 (the third-order equation
needs initial data the construction does not provide) and the
third-order equation is then *verified*, not integrated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._fd import central_offsets, fd_weights
from .amplitude import AmplitudeTrajectory

__all__ = ["ErmakovSolution", "from_mode", "pinney_residual", "gamma_residual"]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)

_STENCIL = central_offsets(4)  # 9 points, 6th-order derivatives up to third


@dataclass(frozen=True)
class ErmakovSolution:
    """Pinney amplitude S(t) > 0 and monotone phase gamma(t) of a mode."""

    traj: AmplitudeTrajectory
    scale: float      # S = scale * |f|
    gamma0: float     # gamma(t0) = arg f(t0)

    def S(self, t):
        f, _ = self.traj.mode(t)
        return self.scale * np.abs(f)

    def Sdot(self, t):
        f, fdot = self.traj.mode(t)
        return self.scale * (np.conj(f) * fdot).real / np.abs(f)

    def _inv_s2_integral(self, a: float, b: float) -> float:
        """int_a^b S^-2 by composite 16-node Gauss-Legendre panels.

        The integrand is smooth with curvature set by omega, so panels a
        small fraction of the local period put the error at roundoff.
        """
        if b == a:
            return 0.0
        w_max = self.traj.profile.omega_max(min(a, b), max(a, b))
        panel = 0.1 * 2.0 * math.pi / max(w_max, 1e-12)
        n = max(1, int(math.ceil(abs(b - a) / panel)))
        edges = np.linspace(a, b, n + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        ts = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
        vals = 1.0 / self.S(ts) ** 2
        return float(half * np.sum(vals.reshape(n, -1) @ _GL_WEIGHTS))

    def gamma(self, t):
        """gamma(t) = gamma0 + int_{t0}^t S^-2."""
        return self.gamma0 + self._inv_s2_integral(self.traj.t0, float(t))

    def gamma_many(self, ts):
        """gamma at many (sorted or not) times via cumulative quadrature."""
        ts = np.asarray(ts, dtype=float)
        order = np.argsort(ts)
        anchors = np.concatenate(([self.traj.t0], ts[order]))
        out = np.empty(ts.size)
        acc = 0.0
        for i in range(ts.size):
            acc += self._inv_s2_integral(float(anchors[i]), float(anchors[i + 1]))
            out[order[i]] = self.gamma0 + acc
        return out

    def gamma_relative(self, ts):
        """gamma(ts) - gamma(ts[0]) for an increasing stencil, compensated
        (Kahan) so that differencing it does not amplify accumulation
        roundoff; derivatives of gamma only ever need this."""
        ts = np.asarray(ts, dtype=float)
        out = np.empty(ts.size)
        out[0] = 0.0
        acc = comp = 0.0
        for i in range(1, ts.size):
            inc = self._inv_s2_integral(float(ts[i - 1]), float(ts[i])) - comp
            total = acc + inc
            comp = (total - acc) - inc
            acc = total
            out[i] = acc
        return out


def from_mode(traj: AmplitudeTrajectory) -> ErmakovSolution:
    """Rescale the mode into the unit-coefficient Pinney pair (S, gamma).

    Needs Im C(t0) != 0 (C is purely imaginary for any data); the scale is
    sqrt(2 / |C(t0)|), which normalizes R^2 gamma' to one.
    """
    A0, Adot0 = traj.A0, traj.Adot0
    C0 = (np.conj(A0) * Adot0 - A0 * np.conj(Adot0)
          + 2j * traj.omega0 * abs(A0) ** 2)
    w = C0.imag / 2.0   # = Im(conj(f) f'), conserved
    if w <= 0:
        raise ValueError("mode has non-positive winding Im(conj(f) f'); "
                         "use data with C(t0) on the positive imaginary axis")
    return ErmakovSolution(traj, scale=math.sqrt(2.0 / abs(C0)),
                           gamma0=math.atan2(A0.imag, A0.real))


def _stencil_times(sol, t, h):
    lo, hi = sol.traj.t0, sol.traj.t1
    half = max(_STENCIL)
    t = float(t)
    t = min(max(t, lo + (half + 0.5) * h), hi - (half + 0.5) * h)
    return t + h * np.asarray(_STENCIL, dtype=float)


def _default_h(sol, factor: float) -> float:
    return factor / sol.traj.profile.omega_max(sol.traj.t0, sol.traj.t1)


def pinney_residual(sol: ErmakovSolution, t: float, h: float | None = None) -> float:
    """|S'' + omega^2 S - S^-3|, with S'' a 6th-order difference of S'."""
    if h is None:
        h = _default_h(sol, 0.005)
    ts = _stencil_times(sol, t, h)
    tc = float(ts[len(ts) // 2])
    d1 = fd_weights(_STENCIL, 1)
    sdd = float(d1 @ sol.Sdot(ts)) / h
    w = sol.traj.profile.omega(tc)
    s = float(sol.S(tc))
    return abs(sdd + w * w * s - s ** -3)


def gamma_residual(sol: ErmakovSolution, t: float, h: float | None = None) -> float:
    """Residual of the third-order phase equation from differences of gamma.

    The common quadrature path from t0 to the stencil cancels in every
    derivative, so the accuracy is set by the tiny inter-stencil
    increments, not by the long integral. Two numerical guards matter for
    the third difference: the stencil is snapped to a power-of-two lattice
    (exactly uniform abscissae, no node jitter) and the dominant linear
    part of gamma is removed before differencing.
    """
    if h is None:
        h = _default_h(sol, 0.01)
    h = 2.0 ** math.floor(math.log2(h))
    half = max(_STENCIL)
    lo = math.ceil((sol.traj.t0 + 0.25 * h) / h) + half
    hi = math.floor((sol.traj.t1 - 0.25 * h) / h) - half
    base = min(max(round(float(t) / h), lo), hi)
    ts = h * (base + np.asarray(_STENCIL, dtype=float))
    g = sol.gamma_relative(ts)
    slope = (g[-1] - g[0]) / (ts[-1] - ts[0])
    resid = g - slope * (ts - ts[0])
    g1 = slope + float(fd_weights(_STENCIL, 1) @ resid) / h
    g2 = float(fd_weights(_STENCIL, 2) @ resid) / h ** 2
    g3 = float(fd_weights(_STENCIL, 3) @ resid) / h ** 3
    w = sol.traj.profile.omega(float(ts[half]))
    return abs(g1 * g3 - 1.5 * g2 * g2 - 2.0 * (w * w - g1 * g1) * g1 * g1)
