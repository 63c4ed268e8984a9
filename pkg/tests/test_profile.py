import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from qhe.errors import ProfileError
from qhe.profile import FrequencyProfile


def test_constant_profile():
    p = FrequencyProfile.constant(2.0, 1.0)
    assert p(3.7) == (2.0, 1.0)
    assert p.half_detuning(0.3) == 0.5


def test_sinusoidal_detuning_is_symmetric():
    p = FrequencyProfile.sinusoidal(3.0, 1.0, 0.2, 2.0)
    wa, wb = p(0.4)
    s = math.sin(0.8)
    assert wa == pytest.approx(3.0 + 0.2 * s)
    assert wb == pytest.approx(1.0 - 0.2 * s)
    assert wa - wb == pytest.approx(2.0 + 0.4 * s)


def test_common_mode_leaves_detuning_unchanged():
    a = FrequencyProfile.sinusoidal(3.0, 1.0, 0.2, 2.0)
    b = FrequencyProfile.sinusoidal(3.0, 1.0, 0.2, 2.0, common=0.5)
    t = np.linspace(0, 5, 11)
    np.testing.assert_allclose(a.detuning(t), b.detuning(t))


def test_tabulated_interpolates_linearly():
    p = FrequencyProfile.tabulated([[0, 2, 1], [1, 4, 1], [2, 4, 3]])
    assert p(0.5) == (3.0, 1.0)
    assert p(1.5) == (4.0, 2.0)


def test_tabulated_outside_range_raises():
    p = FrequencyProfile.tabulated([[0, 2, 1], [1, 4, 1]])
    with pytest.raises(ProfileError):
        p(1.5)
    assert p.t_max == 1.0


@pytest.mark.parametrize("rows", [
    [[0, 1, 1]],
    [[0, 1, 1], [0, 2, 2]],
    [[0, 1, 1], [1, 2]],
])
def test_bad_tables_rejected(rows):
    with pytest.raises(ValueError):
        FrequencyProfile.tabulated(rows)


def test_non_finite_table_is_profile_error():
    with pytest.raises(ProfileError):
        FrequencyProfile.tabulated([[0, 1, 1], [1, np.nan, 1]])


def test_invalid_parameters():
    with pytest.raises(ValueError):
        FrequencyProfile(1.0, 1.0, shape="square")
    with pytest.raises(ValueError):
        FrequencyProfile.sinusoidal(1.0, 1.0, 0.1, 0.0)
    with pytest.raises(ValueError):
        FrequencyProfile.constant(-1.0)


@pytest.mark.parametrize("profile", [
    FrequencyProfile.constant(2.0, 1.0),
    FrequencyProfile.sinusoidal(3.0, 1.0, 0.3, 1.7, common=0.2),
    FrequencyProfile.tabulated([[0, 2, 1], [0.7, 3, 1.5], [2.0, 2.5, 0.5], [4.0, 2.0, 1.0]]),
])
def test_integral_matches_quadrature(profile):
    for t in (0.0, 0.5, 1.3, 3.9):
        ref = quad(lambda s: 0.5 * sum(profile(s)), 0, t, limit=200, points=[0.7, 2.0])[0] \
            if t > 0 else 0.0
        assert profile.integral(t) == pytest.approx(ref, abs=1e-10)


def test_closure():
    p = FrequencyProfile.sinusoidal(3.0, 1.0, 0.2, 2.0)
    assert p.is_closed_at(math.pi / 2)
    assert not p.is_closed_at(math.pi / 4)


@settings(max_examples=40, deadline=None)
@given(delta=st.floats(0.0, 1.0), nu=st.floats(0.1, 5.0), t=st.floats(0.0, 50.0))
def test_detuning_bounded_by_max(delta, nu, t):
    p = FrequencyProfile.sinusoidal(2.5, 1.0, delta, nu)
    assert abs(p.detuning(t)) <= p.max_abs_detuning(t) + 1e-12
