"""Command-line front end.

Subcommands::

    tdho profiles                          list bundled frequency profiles
    tdho solve-amplitude -c cfg.toml       amplitude trajectory CSV
    tdho structure -c cfg.toml             structure-function CSV
    tdho kernel -c cfg.toml                propagator samples CSV
    tdho evolve -c cfg.toml [--oracle]     wavepacket evolution CSV + JSON
    tdho verify [checks ...] -c cfg.toml   residual/oracle report JSON

Exit codes: 0 success, 1 config/validation failure, 2 numerical failure
(caustic or stiffness; the failure time goes to stderr). Output files are
written atomically (temp + rename) with 17-significant-digit floats, so
identical configs give byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .amplitude import classical_oracle, solve_amplitude
from .catalog import BUNDLED
from .config import SimulationConfig, load_config
from .ermakov import from_mode, gamma_residual, pinney_residual
from .errors import NumericalError, ValidationError
from .evolution import (apply_kernel, crank_nicolson_evolve, fidelity,
                        gaussian_state, l2_error)
from .propagator import kernel
from .structure import build

__all__ = ["main"]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: Path, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _color(text: str, code: str) -> str:
    if os.environ.get("NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _ok(flag: bool) -> str:
    return _color("PASS", "32") if flag else _color("FAIL", "31")


# -- subcommands -------------------------------------------------------------


def _cmd_profiles(_args) -> int:
    width = max(len(n) for n in BUNDLED)
    for name, (prof, desc) in BUNDLED.items():
        print(f"{name:<{width}}  kind={prof.kind:<22} domain=[{prof.t_min:g}, "
              f"{prof.t_max:g}]  {desc}")
    return 0


def _out_dir(cfg: SimulationConfig, args) -> Path:
    return Path(args.out) if args.out else Path(cfg.output_dir)


def _sample_times(cfg: SimulationConfig) -> np.ndarray:
    return np.linspace(cfg.t0, cfg.t1, cfg.output_points)


def _cmd_solve_amplitude(args) -> int:
    cfg = load_config(args.config)
    traj = solve_amplitude(cfg.profile, cfg.t0, cfg.t1,
                           rel_tol=cfg.rtol, abs_tol=cfg.atol)
    ts = _sample_times(cfg)
    state = traj.solution(ts)
    theta = traj.theta(ts)
    rows = [(t, a.real, a.imag, ad.real, ad.imag, th)
            for t, a, ad, th in zip(ts, state[:, 0], state[:, 1], theta)]
    path = _out_dir(cfg, args) / "amplitude.csv"
    _write_csv(path, ["t", "re_a", "im_a", "re_adot", "im_adot", "theta"], rows)
    print(f"wrote {path} ({len(rows)} rows, {traj.solution.stats.n_steps} steps)")
    return 0


def _cmd_structure(args) -> int:
    cfg = load_config(args.config)
    traj = solve_amplitude(cfg.profile, cfg.t0, cfg.t1,
                           rel_tol=cfg.rtol, abs_tol=cfg.atol)
    sf = build(traj, m=cfg.mass, hbar=cfg.hbar)
    ts = _sample_times(cfg)
    f0, f1, c = sf.F0(ts), sf.F1(ts), sf.C(ts)
    rows = [(t, a.real, a.imag, b.real, b.imag, cc.real, cc.imag, uu, vv, du, dv)
            for t, a, b, cc, uu, vv, du, dv in zip(
                ts, f0, f1, c, sf.u(ts), sf.v(ts), sf.udot(ts), sf.vdot(ts))]
    path = _out_dir(cfg, args) / "structure.csv"
    _write_csv(path, ["t", "re_f0", "im_f0", "re_f1", "im_f1", "re_c", "im_c",
                      "u", "v", "udot", "vdot"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def _parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _cmd_kernel(args) -> int:
    cfg = load_config(args.config)
    traj = solve_amplitude(cfg.profile, cfg.t0, cfg.t1,
                           rel_tol=cfg.rtol, abs_tol=cfg.atol)
    sf = build(traj, m=cfg.mass, hbar=cfg.hbar)
    half = 0.5 * max(abs(cfg.x_min), abs(cfg.x_max))
    qs = _parse_floats(args.q) if args.q else list(np.linspace(-half, half, 9))
    q0s = _parse_floats(args.q0) if args.q0 else [cfg.state_center]
    rows = []
    for t in cfg.checkpoints:
        if t <= cfg.t0:
            continue
        for q0 in q0s:
            for q in qs:
                s = kernel(sf, q, q0, t)
                rows.append((q, q0, t, s.value.real, s.value.imag, s.action,
                             s.maslov_index))
    path = _out_dir(cfg, args) / "kernel.csv"
    _write_csv(path, ["q", "q0", "t", "re_k", "im_k", "action", "maslov_index"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def _cmd_evolve(args) -> int:
    cfg = load_config(args.config)
    traj = solve_amplitude(cfg.profile, cfg.t0, cfg.t1,
                           rel_tol=cfg.rtol, abs_tol=cfg.atol)
    sf = build(traj, m=cfg.mass, hbar=cfg.hbar)
    psi0 = gaussian_state(cfg.x_min, cfg.x_max, cfg.n, center=cfg.state_center,
                          momentum=cfg.state_momentum, width=cfg.state_width,
                          m=cfg.mass, hbar=cfg.hbar)
    out = _out_dir(cfg, args)
    oracle_dt = args.oracle_dt
    if oracle_dt is None:
        oracle_dt = min(5e-4, 0.009 / cfg.profile.omega_max(cfg.t0, cfg.t1))

    summary = {"config": str(args.config), "checkpoints": []}
    psi_cn, t_prev = psi0, cfg.t0
    for i, t in enumerate(cfg.checkpoints):
        psi = apply_kernel(sf, psi0, t) if t > cfg.t0 else psi0
        rows = [(x, v.real, v.imag, abs(v) ** 2) for x, v in zip(psi.x, psi.values)]
        path = out / f"psi_{i:04d}.csv"
        _write_csv(path, ["x", "re_psi", "im_psi", "abs2_psi"], rows)
        entry = {"t": t, "file": path.name, "norm": psi.norm(),
                 "expectation_x": psi.expectation_x()}
        if args.oracle and t > cfg.t0:
            psi_cn = crank_nicolson_evolve(cfg.profile, psi_cn, t_prev, t, oracle_dt)
            t_prev = t
            entry["oracle_l2_error"] = l2_error(psi, psi_cn)
            entry["oracle_fidelity"] = fidelity(psi, psi_cn)
        summary["checkpoints"].append(entry)
    _write_json(out / "summary.json", summary)
    print(f"wrote {out / 'summary.json'} ({len(cfg.checkpoints)} checkpoint(s))")
    return 0


# -- verify -------------------------------------------------------------------

_VERIFY_CHECKS = ("conservation", "classical", "structure", "ermakov", "quantum")


def _verify_conservation(cfg, traj, sf, rng):
    ts = traj.solution.ts
    drift = float(np.max(np.abs(sf.C(ts) - sf.C0)) / abs(sf.C0))
    return drift <= 1e-8, {"relative_c_drift": drift, "samples": len(ts)}


def _verify_classical(cfg, traj, sf, rng):
    f0, fdot0 = traj.mode(traj.t0)
    oracle = classical_oracle(cfg.profile, traj.t0, traj.t1, f0, fdot0,
                              rel_tol=min(cfg.rtol, 1e-11), abs_tol=min(cfg.atol, 1e-13))
    ts = np.linspace(traj.t0, traj.t1, 801)
    f, _ = traj.mode(ts)
    q = oracle(ts)[:, 0]
    sup = float(np.max(np.abs(f - q)) / np.max(np.abs(q)))
    return sup <= 1e-7, {"mode_vs_oracle_sup": sup}


def _verify_structure(cfg, traj, sf, rng):
    ts = rng.uniform(traj.t0, traj.t1, 100)
    wr = sf.udot(ts) * sf.v(ts) - sf.u(ts) * sf.vdot(ts)
    wr_err = float(np.max(np.abs(wr - 1.0)))
    comm = np.abs(sf.commutator_coefficient(ts))
    comm_err = float(np.max(np.abs(comm - sf.hbar * np.abs(sf.u(ts)) / sf.m)))
    return (wr_err <= 1e-8 and comm_err <= 1e-8), {
        "wronskian_max_deviation": wr_err,
        "commutator_max_deviation": comm_err,
    }


def _verify_ermakov(cfg, traj, sf, rng):
    sol = from_mode(traj)
    span = traj.t1 - traj.t0
    ts = rng.uniform(traj.t0 + 0.05 * span, traj.t1 - 0.05 * span, 40)
    pin = max(pinney_residual(sol, t) for t in ts)
    gam = max(gamma_residual(sol, t) for t in ts)
    w = cfg.profile.omega(ts)
    pin_scale = float(np.max(w * w * sol.S(ts)))
    gam_scale = float(np.max(2.0 * (w * w + 1.0 / sol.S(ts) ** 4) / sol.S(ts) ** 4)) + 1.0
    ok = pin <= 1e-6 * pin_scale and gam <= 1e-5 * gam_scale
    return ok, {"pinney_residual": pin, "pinney_scale": pin_scale,
                "gamma_residual": gam, "gamma_scale": gam_scale}


def _verify_quantum(cfg, traj, sf, rng):
    psi0 = gaussian_state(cfg.x_min, cfg.x_max, cfg.n, center=cfg.state_center,
                          momentum=cfg.state_momentum, width=cfg.state_width,
                          m=cfg.mass, hbar=cfg.hbar)
    dt = min(5e-4, 0.009 / cfg.profile.omega_max(cfg.t0, cfg.t1))
    worst_l2, worst_fid = 0.0, 1.0
    psi_cn, t_prev = psi0, cfg.t0
    for t in cfg.checkpoints:
        if t <= cfg.t0:
            continue
        psi = apply_kernel(sf, psi0, t)
        psi_cn = crank_nicolson_evolve(cfg.profile, psi_cn, t_prev, t, dt)
        t_prev = t
        worst_l2 = max(worst_l2, l2_error(psi, psi_cn))
        worst_fid = min(worst_fid, fidelity(psi, psi_cn))
    ok = worst_l2 <= 1e-3 and worst_fid >= 0.999
    return ok, {"max_l2_error": worst_l2, "min_fidelity": worst_fid,
                "oracle_dt": dt}


def _cmd_verify(args) -> int:
    cfg = load_config(args.config)
    checks = list(args.checks)
    if args.all or not checks:
        checks = ["conservation", "classical", "structure", "ermakov"]
    if args.quantum and "quantum" not in checks:
        checks.append("quantum")
    unknown = [c for c in checks if c not in _VERIFY_CHECKS]
    if unknown:
        raise ValidationError(f"unknown verify check(s) {unknown}; "
                              f"choose from {_VERIFY_CHECKS}")

    traj = solve_amplitude(cfg.profile, cfg.t0, cfg.t1,
                           rel_tol=min(cfg.rtol, 1e-10), abs_tol=min(cfg.atol, 1e-12))
    sf = build(traj, m=cfg.mass, hbar=cfg.hbar)
    rng = np.random.default_rng(20240801)

    runners = {
        "conservation": _verify_conservation,
        "classical": _verify_classical,
        "structure": _verify_structure,
        "ermakov": _verify_ermakov,
        "quantum": _verify_quantum,
    }
    report = {"profile_kind": cfg.profile.kind, "span": [cfg.t0, cfg.t1],
              "checks": {}, "passed": True}
    for name in checks:
        ok, metrics = runners[name](cfg, traj, sf, rng)
        ok = bool(ok)  # numpy bools are not JSON serializable
        report["checks"][name] = {"passed": ok, **metrics}
        report["passed"] = report["passed"] and ok
        print(f"{_ok(ok)} {name}: " + ", ".join(
            f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}"
            for k, v in metrics.items()))

    path = _out_dir(cfg, args) / "verify_report.json"
    _write_json(path, report)
    print(f"wrote {path}")
    return 0 if report["passed"] else 2


# -- entry point ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tdho",
        description="Propagator and wavepacket evolution for the harmonic "
                    "oscillator with time-dependent frequency.")
    ap.add_argument("--version", action="version", version=f"tdho {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("profiles", help="list bundled frequency profiles")

    def with_config(p):
        p.add_argument("-c", "--config", required=True, help="TOML config file")
        p.add_argument("-o", "--out", help="output directory (overrides config)")
        return p

    with_config(sub.add_parser("solve-amplitude",
                               help="integrate the amplitude equation"))
    with_config(sub.add_parser("structure", help="tabulate structure functions"))
    pk = with_config(sub.add_parser("kernel", help="tabulate propagator samples"))
    pk.add_argument("--q", help="comma-separated output positions")
    pk.add_argument("--q0", help="comma-separated source positions")
    pe = with_config(sub.add_parser("evolve", help="evolve the configured state"))
    pe.add_argument("--oracle", action="store_true",
                    help="also run the Crank-Nicolson oracle and report errors")
    pe.add_argument("--oracle-dt", type=float, default=None)
    pv = with_config(sub.add_parser("verify", help="run verification checks"))
    pv.add_argument("checks", nargs="*",
                    help=f"subset of {', '.join(_VERIFY_CHECKS)} (default: all fast checks)")
    pv.add_argument("--all", action="store_true", help="run the default check set")
    pv.add_argument("--quantum", action="store_true",
                    help="also run the (slow) Crank-Nicolson oracle check")
    return ap


_COMMANDS = {
    "profiles": _cmd_profiles,
    "solve-amplitude": _cmd_solve_amplitude,
    "structure": _cmd_structure,
    "kernel": _cmd_kernel,
    "evolve": _cmd_evolve,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        where = f" at t = {exc.t:.9g}" if exc.t is not None else ""
        print(f"numerical failure{where}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
