"""The closed-form propagator <q, t | q0, t0> and its validity machinery.

Between caustics (zeros of u) the kernel is

    K = sqrt(m / (2 pi hbar |u|)) * exp(-i pi/4 - i pi nu/2)
        * exp(i S(q, q0, t) / hbar)

with S the classical action and nu the Maslov index (number of zeros of
u crossed on (t0, t]). For u > 0 and nu = 0 this is literally the
principal branch of sqrt(m / (2 pi i hbar u)); each caustic crossing
appends a factor exp(-i pi/2), which continues the kernel correctly past
the focus, as the constant-frequency Mehler kernel and the
Crank-Nicolson oracle both confirm.

``caustic_correction=False`` evaluates the kernel as if u never changed
sign (|u| everywhere, no phase jumps): the naive no-branch-tracking
implementation, kept as a negative-control hook for tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CausticError
from .structure import StructureFunctions

__all__ = ["PropagatorSample", "kernel", "kernel_matrix", "mehler_kernel",
           "maslov_index", "delta_family_check", "DeltaFamilyReport",
           "quadrature_points_needed"]

#: sampling density (points per local phase oscillation) below which
#: fixed-grid quadrature of the kernel integral starts aliasing
POINTS_PER_OSCILLATION = 8.0


@dataclass(frozen=True)
class PropagatorSample:
    """One kernel evaluation; the exponent is purely imaginary for real
    endpoints, so ``abs(value) == prefactor_modulus``."""

    value: complex
    action: float
    prefactor_modulus: float
    maslov_index: int
    caustic_flag: bool


def maslov_index(sf: StructureFunctions, t: float) -> int:
    """Number of zeros of u on (t0, t]; errors if t sits on a caustic."""
    t = float(t)
    if abs(sf.u(t)) <= sf.eps_caustic:
        raise CausticError(f"t = {t:.9g} is a caustic (u = 0)", t=t,
                           nearest_caustic=sf.nearest_caustic(t))
    zs = sf.caustic_times
    return int(np.count_nonzero(zs <= t))


def _check_caustic(sf, t, u):
    if abs(u) <= sf.eps_caustic:
        raise CausticError(
            f"kernel evaluation at t = {t:.9g} too close to a caustic "
            f"(|u| = {abs(u):.3g} <= {sf.eps_caustic:.3g})",
            t=float(t), nearest_caustic=sf.nearest_caustic(t))


def kernel(sf: StructureFunctions, q: float, q0: float, t: float,
           caustic_correction: bool = True) -> PropagatorSample:
    """Evaluate <q, t | q0, t0> for one endpoint pair."""
    t = float(t)
    u = sf.u(t)
    _check_caustic(sf, t, u)
    nu = maslov_index(sf, t) if caustic_correction else 0
    u_eff = u if caustic_correction else abs(u)
    action = sf.m / (2.0 * u_eff) * (sf.udot(t) * q * q + sf.v(t) * q0 * q0
                                     - 2.0 * q * q0)
    pref = math.sqrt(sf.m / (2.0 * math.pi * sf.hbar * abs(u)))
    phase = -0.25 * math.pi - 0.5 * math.pi * nu + action / sf.hbar
    value = pref * complex(math.cos(phase), math.sin(phase))
    near = abs(u) <= 1e4 * sf.eps_caustic
    return PropagatorSample(value=value, action=float(action),
                            prefactor_modulus=pref, maslov_index=nu,
                            caustic_flag=bool(near))


def kernel_matrix(sf: StructureFunctions, q: np.ndarray, q0: np.ndarray,
                  t: float, caustic_correction: bool = True,
                  max_chunk_bytes: int = 1 << 27) -> np.ndarray:
    """Vectorized K[i, j] = <q[i], t | q0[j], t0>, chunked over output rows."""
    t = float(t)
    u = sf.u(t)
    _check_caustic(sf, t, u)
    nu = maslov_index(sf, t) if caustic_correction else 0
    u_eff = u if caustic_correction else abs(u)
    udot, v = sf.udot(t), sf.v(t)
    q = np.asarray(q, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    a = sf.m / (2.0 * sf.hbar * u_eff)
    pref = math.sqrt(sf.m / (2.0 * math.pi * sf.hbar * abs(u)))
    const = -0.25 * math.pi - 0.5 * math.pi * nu

    out = np.empty((q.size, q0.size), dtype=complex)
    rows = max(1, int(max_chunk_bytes // max(16 * q0.size, 1)))
    col = a * v * q0 * q0
    for lo in range(0, q.size, rows):
        hi = min(lo + rows, q.size)
        qc = q[lo:hi, None]
        phase = a * (udot * qc * qc - 2.0 * qc * q0[None, :]) + col[None, :] + const
        out[lo:hi] = pref * np.exp(1j * phase)
    return out


def mehler_kernel(omega0: float, m: float, hbar: float, q: float, q0: float,
                  dt: float) -> complex:
    """Exact constant-frequency propagator (closed form), Maslov phase included.

    nu = floor(omega0 * dt / pi); errors at the caustics sin(omega0 dt) = 0.
    """
    if dt <= 0:
        raise ValueError("mehler_kernel needs dt > 0")
    x = omega0 * dt
    s, c = math.sin(x), math.cos(x)
    if abs(s) <= 1e-12:
        raise CausticError(f"sin(omega0 dt) = {s:.3g}: caustic", t=dt)
    nu = int(math.floor(x / math.pi))
    action = m * omega0 / (2.0 * s) * ((q * q + q0 * q0) * c - 2.0 * q * q0)
    pref = math.sqrt(m * omega0 / (2.0 * math.pi * hbar * abs(s)))
    phase = -0.25 * math.pi - 0.5 * math.pi * nu + action / hbar
    return pref * complex(math.cos(phase), math.sin(phase))


def quadrature_points_needed(sf: StructureFunctions, t: float,
                             q_extent: float, q0_extent: float) -> int:
    """Minimum quadrature points over [-q0_extent, q0_extent] to keep
    POINTS_PER_OSCILLATION samples per local oscillation of the kernel."""
    u = sf.u(t)
    _check_caustic(sf, t, u)
    grad = sf.m * (abs(sf.v(t)) * q0_extent + q_extent) / (sf.hbar * abs(u))
    n = int(math.ceil(2.0 * q0_extent * grad / (2.0 * math.pi)
                      * POINTS_PER_OSCILLATION)) + 1
    return max(n, 33)


@dataclass(frozen=True)
class DeltaFamilyReport:
    dts: tuple[float, ...]
    distances: tuple[float, ...]
    strictly_decreasing: bool
    final_distance: float

    def __str__(self):
        rows = ", ".join(f"dt={d:g}: {x:.3e}" for d, x in zip(self.dts, self.distances))
        tag = "decreasing" if self.strictly_decreasing else "NOT decreasing"
        return f"delta-family distances [{rows}] ({tag})"


def delta_family_check(sf: StructureFunctions, dts, sigma: float,
                       n_out: int = 257) -> DeltaFamilyReport:
    """Propagate a width-``sigma`` Gaussian over each (decreasing) dt and
    report its distance from the initial state.

    The reported number is the L2 distance modulo a global phase,
    sqrt(|psi|^2 + |psi0|^2 - 2 |<psi0|psi>|): the delta-family statement
    is about physical states, and even at dt -> 0 the raw difference
    retains the irreducible energy phase exp(-i <H> dt / hbar).

    The internal quadrature grid is sized per dt from the local phase
    gradient of the kernel, so small dt (a nearly-singular kernel) stays
    resolved.
    """
    dts = [float(d) for d in dts]
    if any(b >= a for a, b in zip(dts, dts[1:])):
        raise ValueError("dt sequence must be strictly decreasing")
    if not dts or dts[-1] <= 0:
        raise ValueError("dt sequence must be positive")
    if sf.t0 + dts[0] > sf.t1:
        raise ValueError(f"largest dt {dts[0]:g} exceeds the trajectory span")
    L = 8.0 * sigma
    x_out = np.linspace(-L, L, n_out)

    distances = []
    for dt in dts:
        t = sf.t0 + dt
        n_in = quadrature_points_needed(sf, t, q_extent=L, q0_extent=L)
        x_in = np.linspace(-L, L, n_in)
        psi0_in = _norm_gaussian(x_in, sigma)
        w = _simpson_weights(n_in, x_in[1] - x_in[0])
        K = kernel_matrix(sf, x_out, x_in, t)
        psi = K @ (w * psi0_in)
        psi0_out = _norm_gaussian(x_out, sigma)
        dx = x_out[1] - x_out[0]
        na = np.trapezoid(np.abs(psi) ** 2, dx=dx)
        nb = np.trapezoid(np.abs(psi0_out) ** 2, dx=dx)
        ov = abs(np.trapezoid(np.conj(psi0_out) * psi, dx=dx))
        distances.append(float(np.sqrt(max(na + nb - 2.0 * ov, 0.0))))

    dec = all(b < a for a, b in zip(distances, distances[1:]))
    return DeltaFamilyReport(tuple(dts), tuple(distances), dec, distances[-1])


def _norm_gaussian(x, sigma):
    psi = np.exp(-x * x / (2.0 * sigma * sigma)).astype(complex)
    psi /= math.sqrt(float(np.trapezoid(np.abs(psi) ** 2, dx=x[1] - x[0])))
    return psi


def _simpson_weights(n: int, dx: float) -> np.ndarray:
    """Composite Simpson weights; even interval counts get a 3/8 tail."""
    if n < 4:
        raise ValueError("need at least 4 quadrature points")
    w = np.zeros(n)
    intervals = n - 1
    if intervals % 2 == 0:
        w[0] = 1.0
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w[-1] = 1.0
        w *= dx / 3.0
    elif n == 4:
        w[:] = 3.0 * dx / 8.0 * np.array([1.0, 3.0, 3.0, 1.0])
    else:
        # Simpson on the first n-4 intervals (even count), 3/8 on the last 3
        head = n - 3
        w[0] = 1.0
        w[1:head - 1:2] = 4.0
        w[2:head - 1:2] = 2.0
        w[head - 1] = 1.0
        w *= dx / 3.0
        w[head - 1] += 3.0 * dx / 8.0
        w[head] = 9.0 * dx / 8.0
        w[head + 1] = 9.0 * dx / 8.0
        w[head + 2] = 3.0 * dx / 8.0
    return w
