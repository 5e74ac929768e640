import numpy as np
import pytest

from tdho import FrequencyProfile, build, solve_amplitude


def five_profiles(t_max=12.0):
    """The five bundled frequency laws, rebuilt on a common domain."""
    return {
        "constant": FrequencyProfile.constant(1.0, 0.0, t_max),
        "ramp": FrequencyProfile.linear_ramp(1.0, 0.3, 0.0, t_max),
        "sinusoidal": FrequencyProfile.sinusoidal(1.0, 0.5, 5.0, 0.0, t_max),
        "quench": FrequencyProfile.tanh_quench(1.0, 2.0, 0.5, 0.1, 0.0, t_max),
        "pulse": FrequencyProfile.gaussian_pulse(1.0, 0.8, 5.0, 0.7, 0.0, t_max),
    }


@pytest.fixture(scope="session")
def profiles():
    return five_profiles()


@pytest.fixture(scope="session")
def const_traj():
    p = FrequencyProfile.constant(1.0, 0.0, 12.0)
    return solve_amplitude(p, 0.0, 12.0, rel_tol=1e-11, abs_tol=1e-13)


@pytest.fixture(scope="session")
def const_sf(const_traj):
    return build(const_traj)


@pytest.fixture(scope="session")
def quench_traj(profiles):
    return solve_amplitude(profiles["quench"], 0.0, 12.0,
                           rel_tol=1e-11, abs_tol=1e-13)


@pytest.fixture(scope="session")
def quench_sf(quench_traj):
    return build(quench_traj)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240801)
