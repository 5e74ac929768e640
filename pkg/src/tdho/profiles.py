"""Time-dependent frequency laws omega(t).

A :class:`FrequencyProfile` bundles a positive frequency law with its
derivative and its running phase integral theta(t) = int_{t0}^t omega.
Admissible laws have continuous omega and a continuous derivative except
at finitely many declared breakpoints; integrators place step endpoints
exactly on those breakpoints.

Supported kinds
---------------
constant                omega0
linear_ramp             omega0 + slope * t
sinusoidal_modulation   omega0 + depth * sin(rate * t)
tanh_quench             smooth switch omega_initial -> omega_final
gaussian_pulse          omega0 + amplitude * exp(-(t-center)^2 / (2 width^2))
tabulated               monotone-cubic (PCHIP) interpolation of (t, omega) samples

All profiles are immutable after construction and every operation is a
pure function of ``(profile, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    BreakpointAmbiguityError,
    ProfileConstructionError,
    ProfileDomainError,
)

__all__ = ["FrequencyProfile", "AdmissibilityReport", "Violation"]

_KINDS = (
    "constant",
    "linear_ramp",
    "sinusoidal_modulation",
    "tanh_quench",
    "gaussian_pulse",
    "tabulated",
)

#: parameters required per analytic kind
_PARAMS = {
    "constant": ("omega0",),
    "linear_ramp": ("omega0", "slope"),
    "sinusoidal_modulation": ("omega0", "depth", "rate"),
    "tanh_quench": ("omega_initial", "omega_final", "center", "width"),
    "gaussian_pulse": ("omega0", "amplitude", "center", "width"),
}

_CONSTRUCTION_SAMPLES = 2049


def _log_cosh(x):
    """log(cosh(x)), overflow-safe for large |x|."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


@dataclass(frozen=True)
class Violation:
    t: float
    kind: str  # 'nonpositive_omega' | 'omega_discontinuity' | 'undeclared_omega_dot_jump'
    detail: str


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    violations: tuple[Violation, ...]
    breakpoints: tuple[float, ...]
    samples: int

    def __str__(self):
        if self.admissible:
            bp = f"{len(self.breakpoints)} breakpoint(s)" if self.breakpoints else "no breakpoints"
            return f"admissible ({bp}, {self.samples} samples)"
        lines = [f"NOT admissible ({len(self.violations)} violation(s)):"]
        lines += [f"  t={v.t:.6g}: {v.kind}: {v.detail}" for v in self.violations]
        return "\n".join(lines)


@dataclass(frozen=True)
class FrequencyProfile:
    """A validated frequency law omega(t) > 0 on [t_min, t_max]."""

    kind: str
    params: dict
    t_min: float
    t_max: float
    breakpoints: tuple[float, ...] = ()
    # tabulated kind only: the raw samples
    table_t: tuple[float, ...] = field(default=(), repr=False)
    table_omega: tuple[float, ...] = field(default=(), repr=False)

    # -- construction ------------------------------------------------------

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ProfileConstructionError(f"unknown profile kind {self.kind!r}")
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)
                and self.t_max > self.t_min):
            raise ProfileConstructionError("profile domain must satisfy t_max > t_min")
        if self.kind == "tabulated":
            t = np.asarray(self.table_t, dtype=float)
            w = np.asarray(self.table_omega, dtype=float)
            if t.size < 4:
                raise ProfileConstructionError("tabulated profile needs >= 4 samples")
            if t.size != w.size:
                raise ProfileConstructionError("tabulated t and omega lengths differ")
            if np.any(np.diff(t) <= 0):
                raise ProfileConstructionError("tabulated times must be strictly increasing")
            if t[0] > self.t_min or t[-1] < self.t_max:
                raise ProfileConstructionError("tabulated samples must cover the domain")
        else:
            missing = [p for p in _PARAMS[self.kind] if p not in self.params]
            if missing:
                raise ProfileConstructionError(
                    f"profile kind {self.kind!r} missing parameters {missing}")
            extra = [p for p in self.params if p not in _PARAMS[self.kind]]
            if extra:
                raise ProfileConstructionError(
                    f"profile kind {self.kind!r} got unknown parameters {extra}")
            for name in ("width", "rate"):
                if name in self.params and self.params[name] <= 0:
                    raise ProfileConstructionError(f"parameter {name!r} must be positive")
        bps = tuple(sorted(float(b) for b in self.breakpoints))
        if any(b <= self.t_min or b >= self.t_max for b in bps):
            raise ProfileConstructionError("breakpoints must lie strictly inside the domain")
        object.__setattr__(self, "breakpoints", bps)
        # dense positivity check; the kernel construction needs oscillatory solutions
        mesh = np.linspace(self.t_min, self.t_max, _CONSTRUCTION_SAMPLES)
        w = self._omega_raw(mesh)
        if not np.all(np.isfinite(w)):
            raise ProfileConstructionError("omega(t) is not finite on the domain")
        if np.any(w <= 0.0):
            bad = float(mesh[np.argmin(w)])
            raise ProfileConstructionError(
                f"omega(t) must stay positive; omega({bad:.6g}) = {float(np.min(w)):.6g}")

    # convenience constructors ------------------------------------------------

    @classmethod
    def constant(cls, omega0: float, t_min: float = 0.0, t_max: float = 100.0):
        return cls("constant", {"omega0": float(omega0)}, t_min, t_max)

    @classmethod
    def linear_ramp(cls, omega0: float, slope: float, t_min: float = 0.0,
                    t_max: float = 10.0):
        return cls("linear_ramp", {"omega0": float(omega0), "slope": float(slope)},
                   t_min, t_max)

    @classmethod
    def sinusoidal(cls, omega0: float, depth: float, rate: float,
                   t_min: float = 0.0, t_max: float = 100.0):
        return cls("sinusoidal_modulation",
                   {"omega0": float(omega0), "depth": float(depth), "rate": float(rate)},
                   t_min, t_max)

    @classmethod
    def tanh_quench(cls, omega_initial: float, omega_final: float, center: float,
                    width: float, t_min: float = 0.0, t_max: float = 20.0):
        return cls("tanh_quench",
                   {"omega_initial": float(omega_initial),
                    "omega_final": float(omega_final),
                    "center": float(center), "width": float(width)},
                   t_min, t_max)

    @classmethod
    def gaussian_pulse(cls, omega0: float, amplitude: float, center: float,
                       width: float, t_min: float = 0.0, t_max: float = 20.0):
        return cls("gaussian_pulse",
                   {"omega0": float(omega0), "amplitude": float(amplitude),
                    "center": float(center), "width": float(width)},
                   t_min, t_max)

    @classmethod
    def tabulated(cls, times, omegas, breakpoints=(), t_min=None, t_max=None):
        times = tuple(float(t) for t in times)
        omegas = tuple(float(w) for w in omegas)
        if t_min is None:
            t_min = times[0]
        if t_max is None:
            t_max = times[-1]
        return cls("tabulated", {}, float(t_min), float(t_max),
                   breakpoints=tuple(breakpoints), table_t=times, table_omega=omegas)

    # -- low-level evaluation ---------------------------------------------

    @cached_property
    def _interp(self) -> PchipInterpolator:
        return PchipInterpolator(np.asarray(self.table_t), np.asarray(self.table_omega))

    @cached_property
    def _interp_dot(self):
        return self._interp.derivative()

    @cached_property
    def _interp_anti(self):
        return self._interp.antiderivative()

    def _omega_raw(self, t):
        p = self.params
        if self.kind == "constant":
            return p["omega0"] * np.ones_like(np.asarray(t, dtype=float))
        if self.kind == "linear_ramp":
            return p["omega0"] + p["slope"] * np.asarray(t, dtype=float)
        if self.kind == "sinusoidal_modulation":
            return p["omega0"] + p["depth"] * np.sin(p["rate"] * np.asarray(t, dtype=float))
        if self.kind == "tanh_quench":
            x = (np.asarray(t, dtype=float) - p["center"]) / p["width"]
            return p["omega_initial"] + 0.5 * (p["omega_final"] - p["omega_initial"]) * (1.0 + np.tanh(x))
        if self.kind == "gaussian_pulse":
            x = np.asarray(t, dtype=float) - p["center"]
            return p["omega0"] + p["amplitude"] * np.exp(-x * x / (2.0 * p["width"] ** 2))
        return self._interp(np.asarray(t, dtype=float))

    def _omega_dot_raw(self, t):
        p = self.params
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.zeros_like(t)
        if self.kind == "linear_ramp":
            return p["slope"] * np.ones_like(t)
        if self.kind == "sinusoidal_modulation":
            return p["depth"] * p["rate"] * np.cos(p["rate"] * t)
        if self.kind == "tanh_quench":
            x = (t - p["center"]) / p["width"]
            return 0.5 * (p["omega_final"] - p["omega_initial"]) / (p["width"] * np.cosh(x) ** 2)
        if self.kind == "gaussian_pulse":
            x = t - p["center"]
            return -p["amplitude"] * x / p["width"] ** 2 * np.exp(-x * x / (2.0 * p["width"] ** 2))
        return self._interp_dot(t)

    def _check_domain(self, t):
        t = np.asarray(t, dtype=float)
        eps = 1e-12 * (self.t_max - self.t_min)
        if np.any(t < self.t_min - eps) or np.any(t > self.t_max + eps):
            bad = float(t.flat[int(np.argmax((t < self.t_min - eps) | (t > self.t_max + eps)))])
            raise ProfileDomainError(
                f"t = {bad:.6g} outside profile domain [{self.t_min:.6g}, {self.t_max:.6g}]")

    # -- public operations --------------------------------------------------

    def omega(self, t):
        """Angular frequency at time t (scalar or array)."""
        self._check_domain(t)
        w = self._omega_raw(t)
        return float(w) if np.isscalar(t) else w

    def omega_dot(self, t, side: str | None = None):
        """Time derivative of omega.

        At a declared breakpoint the two one-sided limits may differ, so the
        caller must pass ``side='left'`` or ``side='right'`` there; two-sided
        evaluation raises :class:`BreakpointAmbiguityError`.
        """
        if side not in (None, "left", "right"):
            raise ValueError(f"side must be 'left', 'right' or None, got {side!r}")
        self._check_domain(t)
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        if self.breakpoints:
            hit = np.isin(ts, np.asarray(self.breakpoints))
            if np.any(hit):
                if side is None:
                    tb = float(ts[hit][0])
                    raise BreakpointAmbiguityError(
                        f"omega_dot at declared breakpoint t = {tb:.6g} needs side="
                        "'left' or 'right'")
                nudge = np.nextafter(ts, -np.inf if side == "left" else np.inf)
                ts = np.where(hit, nudge, ts)
        d = self._omega_dot_raw(ts)
        return float(d[0]) if np.isscalar(t) else d.reshape(np.shape(t))

    def phase_integral(self, t0, t):
        """theta = int_{t0}^{t} omega(tau) dtau, antisymmetric in (t0, t)."""
        self._check_domain(t0)
        self._check_domain(t)
        p = self.params
        t0 = float(t0)
        tt = np.asarray(t, dtype=float)
        if self.kind == "constant":
            th = p["omega0"] * (tt - t0)
        elif self.kind == "linear_ramp":
            th = p["omega0"] * (tt - t0) + 0.5 * p["slope"] * (tt * tt - t0 * t0)
        elif self.kind == "sinusoidal_modulation":
            th = (p["omega0"] * (tt - t0)
                  - p["depth"] / p["rate"] * (np.cos(p["rate"] * tt) - np.cos(p["rate"] * t0)))
        elif self.kind == "tanh_quench":
            half = 0.5 * (p["omega_final"] - p["omega_initial"])
            x, x0 = (tt - p["center"]) / p["width"], (t0 - p["center"]) / p["width"]
            th = ((p["omega_initial"] + half) * (tt - t0)
                  + half * p["width"] * (_log_cosh(x) - _log_cosh(x0)))
        elif self.kind == "gaussian_pulse":
            from scipy.special import erf
            s = p["width"] * math.sqrt(2.0)
            th = (p["omega0"] * (tt - t0)
                  + p["amplitude"] * p["width"] * math.sqrt(math.pi / 2.0)
                  * (erf((tt - p["center"]) / s) - erf((t0 - p["center"]) / s)))
        else:
            th = self._interp_anti(tt) - self._interp_anti(t0)
        return float(th) if np.isscalar(t) else th

    def omega_max(self, t0=None, t1=None) -> float:
        """Upper bound for omega on [t0, t1] (defaults to the full domain)."""
        t0 = self.t_min if t0 is None else float(t0)
        t1 = self.t_max if t1 is None else float(t1)
        self._check_domain([t0, t1])
        p = self.params
        if self.kind == "constant":
            return p["omega0"]
        if self.kind == "linear_ramp":
            return max(float(self._omega_raw(t0)), float(self._omega_raw(t1)))
        if self.kind == "sinusoidal_modulation":
            return p["omega0"] + abs(p["depth"])
        if self.kind == "tanh_quench":
            return max(p["omega_initial"], p["omega_final"])
        if self.kind == "gaussian_pulse":
            hi = p["omega0"] + max(p["amplitude"], 0.0)
            return max(hi, float(self._omega_raw(t0)), float(self._omega_raw(t1)))
        # PCHIP does not overshoot its data on any interval
        return float(np.max(self.table_omega))

    def validate_admissibility(self, samples: int = 2001) -> AdmissibilityReport:
        """Scan for omega <= 0, omega discontinuities, and undeclared
        derivative jumps on a dense mesh.

        A jump is classified as a discontinuity when it persists while the
        bracketing interval is bisected down to ~1e-8 of the domain: features
        narrower than that resolution are indistinguishable from steps.
        """
        mesh = np.linspace(self.t_min, self.t_max, samples)
        w = self._omega_raw(mesh)
        violations: list[Violation] = []

        bad = np.flatnonzero(w <= 0.0)
        for i in bad[:4]:
            violations.append(Violation(float(mesh[i]), "nonpositive_omega",
                                        f"omega = {float(w[i]):.6g}"))

        scale = float(np.max(np.abs(w))) or 1.0
        span = self.t_max - self.t_min
        width_floor = 1e-8 * span

        # value discontinuities: persistent jumps under bisection
        jumps = np.abs(np.diff(w))
        thresh = max(8.0 * float(np.median(jumps)), 1e-5 * scale)
        for i in np.flatnonzero(jumps > thresh)[:16]:
            a, b = float(mesh[i]), float(mesh[i + 1])
            loc, jump = _persistent_jump(self._omega_raw, a, b, width_floor)
            if jump > 1e-5 * scale:
                violations.append(Violation(loc, "omega_discontinuity",
                                            f"jump of {jump:.4g} across {width_floor:.2g}"))

        # derivative jumps away from declared breakpoints
        half = 0.5 * (mesh[:-1] + mesh[1:])
        wd = self._omega_dot_raw(half)
        dscale = max(float(np.max(np.abs(wd))), 1e-12)
        kinks = np.abs(np.diff(wd))
        dthresh = max(8.0 * float(np.median(kinks)), 1e-5 * dscale)
        declared = np.asarray(self.breakpoints) if self.breakpoints else np.empty(0)
        h = span / (samples - 1)
        for i in np.flatnonzero(kinks > dthresh)[:16]:
            a, b = float(half[i]), float(half[i + 1])
            loc, jump = _persistent_jump(self._omega_dot_raw, a, b, width_floor)
            if jump <= 1e-4 * dscale:
                continue
            if declared.size and np.min(np.abs(declared - loc)) <= 2.0 * h:
                continue
            violations.append(Violation(loc, "undeclared_omega_dot_jump",
                                        f"omega_dot jumps by {jump:.4g}"))

        return AdmissibilityReport(not violations, tuple(violations),
                                   self.breakpoints, samples)


def _persistent_jump(f: Callable, a: float, b: float, width_floor: float):
    """Bisect [a, b] toward the largest variation of f; return (location, jump)
    once the bracket is narrower than width_floor."""
    fa, fb = float(f(a)), float(f(b))
    while (b - a) > width_floor:
        m = 0.5 * (a + b)
        fm = float(f(m))
        if abs(fm - fa) >= abs(fb - fm):
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b), abs(fb - fa)
