"""Acceptance suite: one test per release criterion, each printed as a
single PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Every criterion is checked at its stated tolerance against an independent
route: closed forms, direct classical integration, eigenfunction physics,
or the Crank-Nicolson solver. Runtime budgets are asserted too.
"""

import time

import numpy as np

import tdho
from tdho import (
    FrequencyProfile,
    apply_kernel,
    build,
    classical_oracle,
    crank_nicolson_evolve,
    delta_family_check,
    fidelity,
    from_mode,
    gamma_residual,
    kernel,
    kernel_matrix,
    l2_error,
    maslov_index,
    mehler_kernel,
    pinney_residual,
    solve_amplitude,
)
from tdho.propagator import _simpson_weights

from conftest import five_profiles


def _report(name, ok, detail, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}: {detail} ({elapsed:.2f}s / budget {budget:.0f}s)")
    assert ok, f"{name}: {detail}"
    assert elapsed < budget, f"{name} exceeded runtime budget: {elapsed:.1f}s"


def test_criterion_1_constant_frequency_recovery():
    t_start = time.time()
    p = FrequencyProfile.constant(1.0, 0.0, 4.0)
    sf = build(solve_amplitude(p, 0.0, 4.0, rel_tol=1e-12, abs_tol=1e-14))
    rng = np.random.default_rng(1)
    worst = 0.0
    count = 0
    while count < 1000:
        q, q0 = rng.uniform(-3.0, 3.0, 2)
        dt = rng.uniform(1e-3, 3.0)
        if abs(np.sin(dt)) <= 0.05:
            continue
        count += 1
        kv = kernel(sf, q, q0, dt).value
        mv = mehler_kernel(1.0, 1.0, 1.0, q, q0, dt)
        worst = max(worst, abs(kv - mv) / abs(mv))
    _report("criterion 1 (constant-frequency recovery)", worst <= 1e-10,
            f"max relative error {worst:.3e} over 1000 samples vs Mehler form",
            time.time() - t_start, 5.0)


def test_criterion_2_c_conservation():
    t_start = time.time()
    p = FrequencyProfile.sinusoidal(1.0, 0.5, 5.0, 0.0, 50.0)
    traj = solve_amplitude(p, 0.0, 50.0, rel_tol=1e-10, abs_tol=1e-12)
    sf = build(traj)
    ts = traj.solution.ts
    drift = float(np.max(np.abs(sf.C(ts) - sf.C0)) / abs(sf.C0))
    _report("criterion 2 (conservation of C)", drift <= 1e-8,
            f"relative drift {drift:.3e} at {len(ts)} dense-output samples",
            time.time() - t_start, 1.0)


def test_criterion_3_classical_equivalence():
    t_start = time.time()
    worst = 0.0
    for name, p in five_profiles(t_max=10.0).items():
        traj = solve_amplitude(p, 0.0, 10.0, rel_tol=1e-11, abs_tol=1e-13)
        f0, fdot0 = traj.mode(0.0)
        oracle = classical_oracle(p, 0.0, 10.0, f0, fdot0,
                                  rel_tol=1e-11, abs_tol=1e-13)
        ts = np.linspace(0.0, 10.0, 2001)
        f, _ = traj.mode(ts)
        worst = max(worst, float(np.max(np.abs(f - oracle(ts)[:, 0]))))
    _report("criterion 3 (mode solves the classical equation)", worst <= 1e-7,
            f"sup-norm mode vs direct integration {worst:.3e} on 5 profiles",
            time.time() - t_start, 5.0)


def test_criterion_4_nonadiabatic_quantum_oracle():
    t_start = time.time()
    p = FrequencyProfile.tanh_quench(1.0, 2.0, 0.5, 0.1, 0.0, 20.0)
    ratio = np.abs(p.omega_dot(np.linspace(0, 3, 3001))) / \
        p.omega(np.linspace(0, 3, 3001)) ** 2
    assert np.max(ratio) > 1.0  # strongly non-adiabatic
    sf = build(solve_amplitude(p, 0.0, 20.0, rel_tol=1e-11, abs_tol=1e-13))
    psi0 = tdho.gaussian_state(-12.0, 12.0, 2048, width=1.0)
    worst_l2, worst_fid = 0.0, 1.0
    psi_cn, t_prev = psi0, 0.0
    for t in (0.5, 1.0, 2.0, 4.0):
        psi_cn = crank_nicolson_evolve(p, psi_cn, t_prev, t, dt=2e-4)
        t_prev = t
        pk = apply_kernel(sf, psi0, t)
        worst_l2 = max(worst_l2, l2_error(pk, psi_cn))
        worst_fid = min(worst_fid, fidelity(pk, psi_cn))
    ok = worst_l2 <= 1e-3 and worst_fid >= 0.999
    _report("criterion 4 (non-adiabatic quantum oracle)", ok,
            f"max L2 {worst_l2:.3e}, min fidelity {worst_fid:.6f} at 4 checkpoints",
            time.time() - t_start, 120.0)


def test_criterion_5_unitarity_and_delta_limit():
    t_start = time.time()
    p = FrequencyProfile.tanh_quench(1.0, 2.0, 0.5, 0.1, 0.0, 20.0)
    sf = build(solve_amplitude(p, 0.0, 20.0, rel_tol=1e-11, abs_tol=1e-13))
    psi0 = tdho.gaussian_state(-12.0, 12.0, 2048, width=1.0)
    norm_dev = max(abs(apply_kernel(sf, psi0, t).norm() - 1.0)
                   for t in (0.5, 1.0, 2.0, 4.0))

    pc = FrequencyProfile.constant(1.0, 0.0, 2.0)
    sfc = build(solve_amplitude(pc, 0.0, 2.0, rel_tol=1e-12, abs_tol=1e-14))
    rep = delta_family_check(sfc, [0.1, 0.01, 0.001], sigma=0.95)
    ok = (norm_dev <= 1e-4 and rep.strictly_decreasing
          and rep.final_distance < 1e-4)
    _report("criterion 5 (unitarity and delta limit)", ok,
            f"norm deviation {norm_dev:.3e}; delta distances "
            + "/".join(f"{d:.2e}" for d in rep.distances),
            time.time() - t_start, 30.0)


def test_criterion_6_caustic_traversal():
    t_start = time.time()
    t = 1.2 * np.pi
    p = FrequencyProfile.constant(1.0, 0.0, 10.0)
    sf = build(solve_amplitude(p, 0.0, 10.0, rel_tol=1e-12, abs_tol=1e-14))
    assert maslov_index(sf, t) == 1  # genuinely past the first caustic
    psi0 = tdho.gaussian_state(-12.0, 12.0, 1024, center=1.0, width=1.0)
    psi_cn = crank_nicolson_evolve(p, psi0, 0.0, t, dt=2e-4)
    good = apply_kernel(sf, psi0, t)
    fid_on = fidelity(good, psi_cn)

    # negative control: disable branch tracking (test hook)
    K = kernel_matrix(sf, psi0.x, psi0.x, t, caustic_correction=False)
    w = _simpson_weights(psi0.n, psi0.dx)
    bad = tdho.WavefunctionGrid(psi0.x_min, psi0.x_max, psi0.n,
                                K @ (w * psi0.values))
    fid_off = fidelity(bad, psi_cn)
    ok = fid_on >= 0.999 and fid_off < 0.9
    _report("criterion 6 (caustic traversal + negative control)", ok,
            f"fidelity with correction {fid_on:.6f}, without {fid_off:.3f}",
            time.time() - t_start, 60.0)


def test_criterion_7_ermakov_consistency():
    t_start = time.time()
    rng = np.random.default_rng(7)
    worst_detail = []
    ok = True
    for name, p in five_profiles(t_max=12.0).items():
        traj = solve_amplitude(p, 0.0, 12.0, rel_tol=1e-11, abs_tol=1e-13)
        sol = from_mode(traj)
        ts = rng.uniform(0.3, 11.7, 100)
        pin = max(pinney_residual(sol, t) for t in ts)
        gam = max(gamma_residual(sol, t) for t in ts)
        w = p.omega(ts)
        g1 = 1.0 / sol.S(ts) ** 2
        pin_scale = float(np.max(w * w * sol.S(ts)))
        gam_scale = float(np.max(2.0 * (w * w + g1 * g1) * g1 * g1)) + 1.0

        grid = np.linspace(0.0, 12.0, 161)
        g = sol.gamma_many(grid)
        S, (f, _) = sol.S(grid), traj.mode(grid)
        c = f[0] / (S[0] * np.exp(1j * g[0]))
        match = float(np.max(np.abs(c * S * np.exp(1j * g) - f))
                      / np.max(np.abs(f)))
        ok = ok and pin <= 1e-6 * pin_scale and gam <= 1e-5 * gam_scale \
            and match <= 1e-6
        worst_detail.append(f"{name}: pinney {pin:.1e}, gamma {gam:.1e}, "
                            f"match {match:.1e}")
    _report("criterion 7 (Ermakov consistency)", ok,
            "; ".join(worst_detail), time.time() - t_start, 10.0)


def test_criterion_8_commutator_coefficient():
    t_start = time.time()
    rng = np.random.default_rng(8)
    worst = 0.0
    profs = five_profiles(t_max=12.0)
    for name in ("constant", "sinusoidal", "quench"):
        sf = build(solve_amplitude(profs[name], 0.0, 12.0,
                                   rel_tol=1e-11, abs_tol=1e-13))
        ts = rng.uniform(0.0, 12.0, 200)
        mag = np.abs(sf.commutator_coefficient(ts))
        ref = sf.hbar * np.abs(sf.u(ts)) / sf.m
        worst = max(worst, float(np.max(np.abs(mag - ref))))
    _report("criterion 8 (commutator coefficient)", worst <= 1e-8,
            f"max | |i hbar F0/(m C)| - hbar|u|/m | = {worst:.3e} "
            "at 200 times x 3 profiles", time.time() - t_start, 2.0)


def test_criterion_9_wronskian_and_action_gradients():
    t_start = time.time()
    rng = np.random.default_rng(9)
    p = FrequencyProfile.tanh_quench(1.0, 2.0, 0.5, 0.1, 0.0, 12.0)
    sf = build(solve_amplitude(p, 0.0, 12.0, rel_tol=1e-11, abs_tol=1e-13))
    ts = rng.uniform(0.0, 12.0, 200)
    wr = float(np.max(np.abs(sf.udot(ts) * sf.v(ts)
                             - sf.u(ts) * sf.vdot(ts) - 1.0)))
    eps = 1e-5
    worst_grad = 0.0
    done = 0
    while done < 100:
        q0, p0 = rng.uniform(-2.0, 2.0, 2)
        t = rng.uniform(0.3, 12.0)
        if abs(sf.u(t)) < 0.05:
            continue
        done += 1
        q, pm = sf.classical_trajectory(q0, p0, t)
        dq = (sf.classical_action(q + eps, q0, t)
              - sf.classical_action(q - eps, q0, t)) / (2 * eps)
        dq0 = (sf.classical_action(q, q0 + eps, t)
               - sf.classical_action(q, q0 - eps, t)) / (2 * eps)
        worst_grad = max(worst_grad, abs(dq - pm), abs(dq0 + p0))
    ok = wr <= 1e-8 and worst_grad <= 1e-5
    _report("criterion 9 (Wronskian and action gradients)", ok,
            f"Wronskian deviation {wr:.3e}, gradient deviation {worst_grad:.3e}",
            time.time() - t_start, 5.0)
