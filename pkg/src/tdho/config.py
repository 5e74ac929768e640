"""Simulation configuration: TOML parsing, validation, serialization.

The config has five sections: ``[profile]`` (frequency law), ``[simulation]``
(span, physical constants, tolerances, checkpoints), ``[grid]``,
``[initial_state]`` and ``[output]``. Unknown sections or keys are
rejected by name; ``parse_config(serialize_config(cfg)) == cfg``.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .errors import ConfigError, ProfileConstructionError
from .profiles import FrequencyProfile

__all__ = ["SimulationConfig", "parse_config", "serialize_config", "load_config",
           "profile_from_spec"]

_PROFILE_KEYS = {
    "kind", "t_min", "t_max", "breakpoints", "csv", "times", "omegas", "name",
    "omega0", "slope", "depth", "rate", "omega_initial", "omega_final",
    "center", "width", "amplitude",
}
_SIMULATION_KEYS = {"t0", "t1", "mass", "hbar", "rtol", "atol", "checkpoints"}
_GRID_KEYS = {"x_min", "x_max", "n"}
_STATE_KEYS = {"center", "momentum", "width"}
_OUTPUT_KEYS = {"directory", "points"}
_SECTIONS = {
    "profile": _PROFILE_KEYS,
    "simulation": _SIMULATION_KEYS,
    "grid": _GRID_KEYS,
    "initial_state": _STATE_KEYS,
    "output": _OUTPUT_KEYS,
}


@dataclass(frozen=True)
class SimulationConfig:
    profile: FrequencyProfile
    t0: float
    t1: float
    mass: float = 1.0
    hbar: float = 1.0
    rtol: float = 1e-10
    atol: float = 1e-12
    x_min: float = -10.0
    x_max: float = 10.0
    n: int = 512
    state_center: float = 0.0
    state_momentum: float = 0.0
    state_width: float = 1.0
    checkpoints: tuple[float, ...] = ()
    output_dir: str = "out"
    output_points: int = 501
    profile_spec: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ConfigError(f"t1 = {self.t1:g} must exceed t0 = {self.t0:g} (field 't1')")
        for name in ("mass", "hbar", "rtol", "atol", "state_width"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"field {name!r} must be positive")
        if self.x_max <= self.x_min:
            raise ConfigError("field 'x_max' must exceed x_min")
        if self.n < 16:
            raise ConfigError("field 'n' must be at least 16")
        if self.output_points < 2:
            raise ConfigError("field 'points' must be at least 2")
        cps = tuple(float(c) for c in self.checkpoints) or (self.t1,)
        eps = 1e-12 * (self.t1 - self.t0)
        for c in cps:
            if c < self.t0 - eps or c > self.t1 + eps:
                raise ConfigError(f"checkpoint {c:g} outside [t0, t1] (field 'checkpoints')")
        object.__setattr__(self, "checkpoints", cps)
        if self.profile.t_min > self.t0 or self.profile.t_max < self.t1:
            raise ConfigError("profile domain does not cover [t0, t1] (field 't1')")


def profile_from_spec(spec: dict, default_span: tuple[float, float] | None = None,
                      base_dir: Path | None = None) -> FrequencyProfile:
    """Build a FrequencyProfile from a ``[profile]`` table."""
    spec = dict(spec)
    if "name" in spec:
        from .catalog import bundled_profile
        name = spec.pop("name")
        if spec:
            raise ConfigError(f"profile name = {name!r} cannot be combined with "
                              f"other keys {sorted(spec)}")
        return bundled_profile(name)
    kind = spec.pop("kind", None)
    if kind is None:
        raise ConfigError("[profile] needs a 'kind' key (or a bundled 'name')")
    t_min = spec.pop("t_min", default_span[0] if default_span else None)
    t_max = spec.pop("t_max", default_span[1] if default_span else None)
    if t_min is None or t_max is None:
        raise ConfigError("[profile] needs t_min/t_max (or a [simulation] span)")
    breakpoints = tuple(spec.pop("breakpoints", ()))

    try:
        if kind == "tabulated":
            if "csv" in spec:
                path = Path(spec.pop("csv"))
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                times, omegas = _read_table(path)
            elif "times" in spec and "omegas" in spec:
                times, omegas = spec.pop("times"), spec.pop("omegas")
            else:
                raise ConfigError("tabulated profile needs 'csv' or 'times'+'omegas'")
            if spec:
                raise ConfigError(f"unknown profile key(s) {sorted(spec)}")
            return FrequencyProfile.tabulated(times, omegas, breakpoints=breakpoints,
                                              t_min=t_min, t_max=t_max)
        return FrequencyProfile(kind, {k: float(v) for k, v in spec.items()},
                                float(t_min), float(t_max), breakpoints=breakpoints)
    except ProfileConstructionError as exc:
        raise ConfigError(f"invalid [profile]: {exc}") from exc


def _read_table(path: Path):
    times, omegas = [], []
    try:
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    t, w = float(row[0]), float(row[1])
                except (ValueError, IndexError):
                    continue  # header line
                times.append(t)
                omegas.append(w)
    except OSError as exc:
        raise ConfigError(f"cannot read profile table {path}: {exc}") from exc
    if len(times) < 4:
        raise ConfigError(f"profile table {path} has fewer than 4 numeric rows")
    return times, omegas


def parse_config(text: str, base_dir: Path | None = None) -> SimulationConfig:
    """Parse and validate a TOML config document."""
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config section(s) {sorted(unknown)}")
    for section, keys in _SECTIONS.items():
        got = doc.get(section, {})
        if not isinstance(got, dict):
            raise ConfigError(f"section [{section}] must be a table")
        bad = set(got) - keys
        if bad:
            raise ConfigError(f"unknown key(s) {sorted(bad)} in [{section}]")
    if "profile" not in doc:
        raise ConfigError("config must contain a [profile] section")
    sim = doc.get("simulation", {})
    if "t0" not in sim or "t1" not in sim:
        raise ConfigError("[simulation] must define t0 and t1")

    span = (float(sim["t0"]), float(sim["t1"]))
    if not span[1] > span[0]:
        raise ConfigError(f"t1 = {span[1]:g} must exceed t0 = {span[0]:g} (field 't1')")
    profile = profile_from_spec(doc["profile"], default_span=span, base_dir=base_dir)
    grid = doc.get("grid", {})
    state = doc.get("initial_state", {})
    out = doc.get("output", {})
    return SimulationConfig(
        profile=profile,
        t0=span[0],
        t1=span[1],
        mass=float(sim.get("mass", 1.0)),
        hbar=float(sim.get("hbar", 1.0)),
        rtol=float(sim.get("rtol", 1e-10)),
        atol=float(sim.get("atol", 1e-12)),
        x_min=float(grid.get("x_min", -10.0)),
        x_max=float(grid.get("x_max", 10.0)),
        n=int(grid.get("n", 512)),
        state_center=float(state.get("center", 0.0)),
        state_momentum=float(state.get("momentum", 0.0)),
        state_width=float(state.get("width", 1.0)),
        checkpoints=tuple(float(c) for c in sim.get("checkpoints", ())),
        output_dir=str(out.get("directory", "out")),
        output_points=int(out.get("points", 501)),
        profile_spec=dict(doc["profile"]),
    )


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            raise ConfigError("cannot serialize non-finite float")
        s = f"{v:.17g}"
        return s if any(c in s for c in ".eE") else s + ".0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize {type(v).__name__} to TOML")


def serialize_config(cfg: SimulationConfig) -> str:
    """Emit TOML that parses back to an equal config."""
    prof: dict = {"kind": cfg.profile.kind}
    prof.update(cfg.profile.params)
    prof["t_min"] = cfg.profile.t_min
    prof["t_max"] = cfg.profile.t_max
    if cfg.profile.breakpoints:
        prof["breakpoints"] = list(cfg.profile.breakpoints)
    if cfg.profile.kind == "tabulated":
        if "csv" in cfg.profile_spec:
            prof["csv"] = cfg.profile_spec["csv"]
        else:
            prof["times"] = list(cfg.profile.table_t)
            prof["omegas"] = list(cfg.profile.table_omega)

    sections = {
        "profile": prof,
        "simulation": {
            "t0": cfg.t0, "t1": cfg.t1, "mass": cfg.mass, "hbar": cfg.hbar,
            "rtol": cfg.rtol, "atol": cfg.atol,
            "checkpoints": list(cfg.checkpoints),
        },
        "grid": {"x_min": cfg.x_min, "x_max": cfg.x_max, "n": cfg.n},
        "initial_state": {"center": cfg.state_center, "momentum": cfg.state_momentum,
                          "width": cfg.state_width},
        "output": {"directory": cfg.output_dir, "points": cfg.output_points},
    }
    lines = []
    for section, table in sections.items():
        lines.append(f"[{section}]")
        for key, val in table.items():
            lines.append(f"{key} = {_fmt(val)}")
        lines.append("")
    return "\n".join(lines)


def load_config(path) -> SimulationConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)
