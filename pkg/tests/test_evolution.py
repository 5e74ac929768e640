import numpy as np
import pytest
from scipy.special import eval_hermite, factorial

from tdho import (
    AliasingWarning,
    FrequencyProfile,
    GridMismatchError,
    SupportError,
    WavefunctionGrid,
    apply_kernel,
    build,
    crank_nicolson_evolve,
    fidelity,
    gaussian_state,
    l2_error,
    solve_amplitude,
)


def test_gaussian_state_normalized():
    g = gaussian_state(-10, 10, 512, width=1.0)
    assert abs(g.norm() - 1.0) < 1e-12


def test_gaussian_state_center():
    g = gaussian_state(-10, 10, 512, center=0.75, width=0.8)
    assert abs(g.expectation_x() - 0.75) < 1e-10


def test_gaussian_state_momentum_spectral():
    g = gaussian_state(-10, 10, 1024, center=0.0, momentum=1.3, width=1.0)
    assert abs(g.expectation_p() - 1.3) < 1e-8


def test_gaussian_state_support_violation():
    with pytest.raises(SupportError):
        gaussian_state(-5, 5, 256, center=3.0, width=1.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        WavefunctionGrid(-5, 5, 8, np.zeros(8, dtype=complex))
    with pytest.raises(ValueError):
        WavefunctionGrid(5, -5, 32, np.zeros(32, dtype=complex))


def test_apply_kernel_ground_state_modulus_static(const_sf):
    psi0 = gaussian_state(-10, 10, 1024, width=1.0)
    for t in (0.7, 2.0):
        psi = apply_kernel(const_sf, psi0, t)
        d = np.sqrt(np.trapezoid((np.abs(psi.values) ** 2
                                  - np.abs(psi0.values) ** 2) ** 2, dx=psi.dx))
        assert d < 1e-6


def test_apply_kernel_coherent_state_center(const_sf):
    psi0 = gaussian_state(-10, 10, 1024, center=1.0, width=1.0)
    for t in (0.5, 1.0, 2.5):
        psi = apply_kernel(const_sf, psi0, t)
        q_cl, _ = const_sf.classical_trajectory(1.0, 0.0, t)
        assert abs(psi.expectation_x() - q_cl) < 1e-5


def test_apply_kernel_unitarity(quench_sf):
    psi0 = gaussian_state(-12, 12, 1024, width=1.0)
    for t in (1.0, 4.0):
        psi = apply_kernel(quench_sf, psi0, t)
        assert abs(psi.norm() - 1.0) < 1e-4


def test_apply_kernel_matches_crank_nicolson_quench(quench_sf):
    p = quench_sf.profile
    psi0 = gaussian_state(-12, 12, 1024, width=1.0)
    cn = crank_nicolson_evolve(p, psi0, 0.0, 1.5, dt=2e-4)
    pk = apply_kernel(quench_sf, psi0, 1.5)
    assert l2_error(pk, cn) < 1e-3
    assert fidelity(pk, cn) > 0.999


def test_apply_kernel_composition(quench_sf):
    p = quench_sf.profile
    psi0 = gaussian_state(-12, 12, 1024, width=1.0)
    direct = apply_kernel(quench_sf, psi0, 2.5)
    mid = apply_kernel(quench_sf, psi0, 1.25)
    traj2 = solve_amplitude(p, 1.25, 2.5, rel_tol=1e-11, abs_tol=1e-13)
    sf2 = build(traj2)
    two_leg = apply_kernel(sf2, mid, 2.5)
    assert l2_error(direct, two_leg) < 5e-4


def test_apply_kernel_checks_parameters(const_sf):
    psi0 = gaussian_state(-10, 10, 512, width=1.0, m=2.0)
    with pytest.raises(GridMismatchError):
        apply_kernel(const_sf, psi0, 1.0)


def test_apply_kernel_edge_support_error(const_sf):
    x = np.linspace(-10, 10, 512)
    vals = np.full(512, 0.1, dtype=complex)
    psi = WavefunctionGrid(-10, 10, 512, vals)
    with pytest.raises(SupportError):
        apply_kernel(const_sf, psi, 1.0)


def test_apply_kernel_aliasing_warning(const_sf):
    psi0 = gaussian_state(-10, 10, 64, width=1.0)
    with pytest.warns(AliasingWarning):
        apply_kernel(const_sf, psi0, 0.05)


def test_apply_kernel_oversample_recovers_accuracy(const_sf):
    # n = 96 genuinely aliases at t = 2 (the heuristic wants ~400 points);
    # oversampling restores unitarity and the stationary ground-state modulus
    import warnings
    psi0 = gaussian_state(-10, 10, 96, width=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasingWarning)
        coarse = apply_kernel(const_sf, psi0, 2.0)
        fine = apply_kernel(const_sf, psi0, 2.0, oversample=8)
    exact = gaussian_state(-10, 10, 96, width=1.0)
    d_coarse = np.max(np.abs(np.abs(coarse.values) - np.abs(exact.values)))
    d_fine = np.max(np.abs(np.abs(fine.values) - np.abs(exact.values)))
    assert d_coarse > 1e-4  # the negative control: coarse run really aliases
    assert d_fine < 1e-5
    assert abs(fine.norm() - 1.0) < 1e-4


def test_crank_nicolson_ground_state_stationary():
    p = FrequencyProfile.constant(1.0, 0.0, 10.0)
    psi0 = gaussian_state(-10, 10, 1024, width=1.0)
    psi = crank_nicolson_evolve(p, psi0, 0.0, 2 * np.pi, dt=5e-4)
    d = np.sqrt(np.trapezoid((np.abs(psi.values) ** 2
                              - np.abs(psi0.values) ** 2) ** 2, dx=psi.dx))
    assert d < 1e-6


def test_crank_nicolson_norm_drift():
    p = FrequencyProfile.sinusoidal(1.0, 0.5, 5.0, 0.0, 10.0)
    psi0 = gaussian_state(-10, 10, 512, width=1.0)
    psi = crank_nicolson_evolve(p, psi0, 0.0, 1.0, dt=1e-3)  # 1000 steps
    assert abs(psi.norm() - psi0.norm()) <= 1e-10


def test_crank_nicolson_ehrenfest(quench_sf):
    p = quench_sf.profile
    psi0 = gaussian_state(-12, 12, 2048, center=1.0, width=1.0)
    t = 2.0
    psi = crank_nicolson_evolve(p, psi0, 0.0, t, dt=1e-4)
    q_cl, _ = quench_sf.classical_trajectory(1.0, 0.0, t)
    assert abs(psi.expectation_x() - q_cl) < 1e-4


def test_crank_nicolson_rejects_coarse_dt():
    p = FrequencyProfile.constant(2.0, 0.0, 10.0)
    psi0 = gaussian_state(-10, 10, 256, width=1.0)
    with pytest.raises(ValueError):
        crank_nicolson_evolve(p, psi0, 0.0, 1.0, dt=0.1)


def test_oracle_agreement_across_profiles():
    # kernel quadrature vs Crank-Nicolson on three regimes, ten checkpoints
    # total, quench included (|omega'|/omega^2 > 1)
    cases = {
        "constant": (FrequencyProfile.constant(1.0, 0.0, 10.0), (1.0, 2.0, 3.5)),
        "sinusoidal": (FrequencyProfile.sinusoidal(1.0, 0.5, 5.0, 0.0, 10.0),
                       (0.8, 1.6, 2.4)),
        "quench": (FrequencyProfile.tanh_quench(1.0, 2.0, 0.5, 0.1, 0.0, 10.0),
                   (0.5, 1.0, 2.0, 3.0)),
    }
    for name, (p, checkpoints) in cases.items():
        sf = build(solve_amplitude(p, 0.0, 10.0, rel_tol=1e-11, abs_tol=1e-13))
        psi0 = gaussian_state(-12, 12, 1024, width=1.0)
        psi_cn, t_prev = psi0, 0.0
        for t in checkpoints:
            psi_cn = crank_nicolson_evolve(p, psi_cn, t_prev, t, dt=2.5e-4)
            t_prev = t
            pk = apply_kernel(sf, psi0, t)
            assert l2_error(pk, psi_cn) <= 1e-3, (name, t)
            assert fidelity(pk, psi_cn) >= 0.999, (name, t)


def test_l2_and_fidelity_basic():
    a = gaussian_state(-10, 10, 512, width=1.0)
    b = WavefunctionGrid(-10, 10, 512, -a.values)
    assert l2_error(a, a) == 0.0
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-14)
    assert l2_error(a, b) == pytest.approx(2.0 * a.norm(), rel=1e-12)
    assert fidelity(a, b) == pytest.approx(1.0, abs=1e-14)


def test_fidelity_orthogonal_hermite_modes():
    x = np.linspace(-10, 10, 1024)
    def mode(k):
        v = eval_hermite(k, x) * np.exp(-x * x / 2)
        v = v / np.sqrt(2.0 ** k * factorial(k) * np.sqrt(np.pi))
        return WavefunctionGrid(-10, 10, 1024, v.astype(complex))
    assert fidelity(mode(0), mode(1)) < 1e-10
    assert fidelity(mode(1), mode(2)) < 1e-10


def test_grid_mismatch_error():
    a = gaussian_state(-10, 10, 512, width=1.0)
    b = gaussian_state(-10, 10, 256, width=1.0)
    with pytest.raises(GridMismatchError):
        l2_error(a, b)
