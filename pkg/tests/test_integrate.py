import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhe.errors import ProfileError, StiffnessError
from qhe.integrate import dopri5, integrate, rk4


def harmonic(t, y):
    return np.array([y[1], -y[0]])


def test_dopri5_harmonic_oscillator():
    sol = dopri5(harmonic, 10.0, [1.0, 0.0], 1e-12)
    assert abs(sol.y[-1, 0] - math.cos(10.0)) < 1e-10
    assert sol.t[-1] == 10.0


def test_dense_output_matches_exact_solution():
    sol = dopri5(harmonic, 6.0, [1.0, 0.0], 1e-11)
    t = np.linspace(0, 6, 97)
    assert np.max(np.abs(sol(t)[:, 0] - np.cos(t))) < 1e-9


def test_dense_output_reproduces_nodes_exactly():
    sol = dopri5(harmonic, 3.0, [1.0, 0.0], 1e-8)
    np.testing.assert_array_equal(sol(sol.t), sol.y)


def test_dense_output_rejects_times_outside_range():
    sol = dopri5(harmonic, 1.0, [1.0, 0.0], 1e-8)
    with pytest.raises(ValueError):
        sol(1.5)


def test_complex_state_is_supported():
    sol = dopri5(lambda t, y: 1j * y, 2.0, np.array([1.0 + 0j]), 1e-12)
    assert abs(sol.y[-1, 0] - np.exp(2j)) < 1e-10


def test_non_finite_rhs_raises_profile_error():
    with pytest.raises(ProfileError):
        dopri5(lambda t, y: y * np.nan, 1.0, [1.0], 1e-8)


def test_step_underflow_raises_stiffness_error():
    # finite-time blow-up at t = 1
    with pytest.raises((StiffnessError, ProfileError)):
        dopri5(lambda t, y: y ** 2, 2.0, [1.0], 1e-10)


def test_rk4_is_fourth_order():
    errs = []
    for h in (0.1, 0.05):
        sol = rk4(harmonic, 2.0, [1.0, 0.0], h)
        errs.append(abs(sol.y[-1, 0] - math.cos(2.0)))
    assert 12 < errs[0] / errs[1] < 20


def test_rk4_bitwise_reproducible():
    a = rk4(harmonic, 3.3, [1.0, 0.0], 0.01)
    b = rk4(harmonic, 3.3, [1.0, 0.0], 0.01)
    np.testing.assert_array_equal(a.y, b.y)
    assert a.t[-1] == 3.3


def test_integrate_dispatches_on_fixed_step():
    assert integrate(harmonic, 1.0, [1.0, 0.0], fixed_step=0.1).kind == "hermite"
    assert integrate(harmonic, 1.0, [1.0, 0.0], tol=1e-8).kind == "dopri5"


@settings(max_examples=25, deadline=None)
@given(rate=st.floats(-2.0, 2.0), t_end=st.floats(0.1, 5.0))
def test_linear_decay_property(rate, t_end):
    sol = dopri5(lambda t, y: rate * y, t_end, [1.0], 1e-11)
    assert sol.y[-1, 0] == pytest.approx(math.exp(rate * t_end), rel=1e-8)
