import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhe.errors import DomainError, ProfileError
from qhe.mode_dynamics import (ModeCoefficients, constant_profile_oracle, evolve_modes,
                               generalized_rabi_frequency, rabi_closed_form,
                               unitarity_residuals)
from qhe.profile import FrequencyProfile


def test_initial_coefficients():
    traj = evolve_modes(FrequencyProfile.constant(1.0), 1.0, t_eval=[0.0, 1.0])
    np.testing.assert_allclose(traj.coeffs[0], [1, 0, 1, 0])


def test_resonant_swap_at_half_pi():
    # C vanishes and |D| = 1 after a quarter Rabi period
    traj = evolve_modes(FrequencyProfile.constant(1.0), math.pi / 2, t_eval=[math.pi / 2])
    assert abs(traj.C[0]) < 1e-9
    assert abs(traj.D[0]) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("frame", ["rotating", "lab"])
def test_rabi_closed_form(frame):
    t = np.linspace(0, 10 * math.pi, 301)
    traj = evolve_modes(FrequencyProfile.constant(1.3), t[-1], 1e-10, t_eval=t, frame=frame)
    exact = rabi_closed_form(1.3, t).as_array()
    assert np.max(np.abs(traj.coeffs - exact)) < 1e-8


def test_detuned_constant_profile_matches_matrix_exponential():
    t = np.linspace(0, 20, 81)
    traj = evolve_modes(FrequencyProfile.constant(2.5, 0.7), t[-1], 1e-10, t_eval=t)
    exact = constant_profile_oracle(2.5, 0.7, t).as_array()
    assert np.max(np.abs(traj.coeffs - exact)) < 1e-8


def test_dense_output_in_lab_frame():
    prof = FrequencyProfile.sinusoidal(3.0, 1.0, 0.2, 2 * math.sqrt(2))
    traj = evolve_modes(prof, 10.0)
    t = np.array([0.37, 4.2, 9.9])
    direct = evolve_modes(prof, 10.0, t_eval=t)
    assert np.max(np.abs(traj.at(t) - direct.coeffs)) < 1e-12


def test_fixed_step_mode():
    t = np.linspace(0, 5, 51)
    traj = evolve_modes(FrequencyProfile.constant(1.0), 5.0, t_eval=t, fixed_step=0.01)
    exact = rabi_closed_form(1.0, t).as_array()
    assert np.max(np.abs(traj.coeffs - exact)) < 1e-8


def test_closed_form_requires_positive_omega():
    with pytest.raises(DomainError):
        rabi_closed_form(0.0, 1.0)


@pytest.mark.parametrize("tol", [1e-3, 1e-14])
def test_tolerance_range(tol):
    with pytest.raises(DomainError):
        evolve_modes(FrequencyProfile.constant(1.0), 1.0, tol)


def test_non_positive_duration():
    with pytest.raises(DomainError):
        evolve_modes(FrequencyProfile.constant(1.0), 0.0)


def test_tabulated_profile_horizon():
    prof = FrequencyProfile.tabulated([[0, 2, 1], [1, 2, 1]])
    with pytest.raises(ProfileError):
        evolve_modes(prof, 2.0)


def test_residuals_of_exact_solution_vanish():
    c = rabi_closed_form(1.0, np.linspace(0, 3, 7))
    assert max(r.max() for r in c.residuals()) < 1e-15


def test_residuals_detect_corruption():
    c = ModeCoefficients(1.0, 0.1, 1.0, 0.0)
    r1, r2, r3 = c.residuals()
    assert r1 == pytest.approx(0.01)
    assert r3 == pytest.approx(0.1)


def test_generalized_rabi_frequency():
    assert generalized_rabi_frequency(0.0) == 1.0
    assert generalized_rabi_frequency(2.0) == pytest.approx(math.sqrt(2.0))


@settings(max_examples=15, deadline=None)
@given(wa=st.floats(0.2, 4.0), wb=st.floats(0.2, 4.0), delta=st.floats(0.0, 0.5),
       nu=st.floats(0.3, 5.0))
def test_unitarity_property(wa, wb, delta, nu):
    prof = FrequencyProfile.sinusoidal(max(wa, wb), min(wa, wb), delta, nu)
    traj = evolve_modes(prof, 15.0, 1e-10)
    assert unitarity_residuals(traj).max() < 1e-8
