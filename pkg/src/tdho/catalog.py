"""Bundled frequency profiles used by the CLI, docs, and verification suite.

The five laws cover the interesting regimes: static, slow drift, periodic
driving, a strongly non-adiabatic quench (|omega'|/omega^2 up to ~2.5),
and a smooth localized pulse.
"""

from __future__ import annotations

from .errors import ConfigError
from .profiles import FrequencyProfile

__all__ = ["BUNDLED", "bundled_profile", "bundled_names"]


def _make() -> dict[str, tuple[FrequencyProfile, str]]:
    return {
        "constant": (
            FrequencyProfile.constant(1.0, 0.0, 50.0),
            "omega = 1 (static reference)"),
        "ramp": (
            FrequencyProfile.linear_ramp(1.0, 0.3, 0.0, 12.0),
            "omega = 1 + 0.3 t (slow drift)"),
        "sinusoidal": (
            FrequencyProfile.sinusoidal(1.0, 0.5, 5.0, 0.0, 60.0),
            "omega = 1 + 0.5 sin(5 t) (parametric drive)"),
        "quench": (
            FrequencyProfile.tanh_quench(1.0, 2.0, 0.5, 0.1, 0.0, 20.0),
            "tanh switch 1 -> 2 at t = 0.5, width 0.1 (non-adiabatic)"),
        "pulse": (
            FrequencyProfile.gaussian_pulse(1.0, 0.8, 5.0, 0.7, 0.0, 20.0),
            "gaussian bump +0.8 at t = 5, width 0.7"),
    }


BUNDLED = _make()


def bundled_names() -> list[str]:
    return list(BUNDLED)


def bundled_profile(name: str) -> FrequencyProfile:
    try:
        return BUNDLED[name][0]
    except KeyError:
        raise ConfigError(
            f"unknown bundled profile {name!r}; available: {', '.join(BUNDLED)}"
        ) from None
