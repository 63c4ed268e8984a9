import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhe.counter_rotating import (evolve_cr_moments, fock_oracle_cr, random_closed_profile,
                                  run_cr_cycle, verify_s6)
from qhe.errors import CycleClosureError, DomainError, TruncationError
from qhe.profile import FrequencyProfile

SINH2_ONE = 1.3810978455418157  # sinh(1)^2, mpmath


def test_fock_oracle_vacuum_growth():
    n_a, n_b = fock_oracle_cr(0.0, 0.0, 1.0)
    assert n_a == pytest.approx(SINH2_ONE, rel=1e-12)
    assert n_a == n_b
    assert fock_oracle_cr(0.0, 0.0, 0.0)[0] == pytest.approx(0.0, abs=1e-20)


def test_fock_oracle_auto_doubles_and_strict_mode_raises():
    t = 2.0  # sinh^2(2) ~ 13 needs far more than 20 pair levels
    with pytest.raises(TruncationError):
        fock_oracle_cr(0.0, 0.0, t, n_max=20, auto=False)
    n_a, _ = fock_oracle_cr(0.0, 0.0, t, n_max=20)
    assert n_a == pytest.approx(math.sinh(t) ** 2, rel=1e-9)


def test_fock_oracle_rejects_small_cutoff():
    with pytest.raises(DomainError):
        fock_oracle_cr(1.0, 1.0, 1.0, n_max=10)


@pytest.mark.parametrize("wa,wb", [(1e-6, 1e-6), (0.4, 0.3), (1.5, 1.0), (3.0, 2.0)])
def test_moments_match_fock_oracle(wa, wb):
    t = np.linspace(0, 2.0, 41)
    traj = evolve_cr_moments(FrequencyProfile.constant(wa, wb), 0.0, 0.0, 2.0, t_eval=t)
    fock, _ = fock_oracle_cr(wa, wb, t)
    assert np.max(np.abs(traj.n_a - fock)) <= 1e-7


def test_difference_conserved_and_floor():
    prof = FrequencyProfile.sinusoidal(2.0, 1.0, 0.3, 1.3, common=0.2)
    traj = evolve_cr_moments(prof, 1.2, 0.4, 15.0)
    assert traj.difference_drift() <= 1e-9
    assert traj.floor_violation() <= 1e-9
    assert traj.invariant_drift() <= 1e-8 * np.max((traj.total + 1) ** 2)


def test_large_detuning_keeps_growth_small():
    traj = evolve_cr_moments(FrequencyProfile.constant(10.0, 10.0), 0.0, 0.0, 20.0)
    assert traj.n_a.max() <= 2 * (2 / 20.0) ** 2


def test_s6_identity():
    t = np.linspace(0, 3, 10_000)
    res = verify_s6(evolve_cr_moments(FrequencyProfile.constant(3.0, 1.0), 0.3, 0.1, 3.0,
                                      t_eval=t))
    assert res.lhs[0] == pytest.approx(0.0, abs=1e-15)
    assert res.max_residual <= 1e-5


def test_s6_scaled_residual_under_growth():
    t = np.linspace(0, 3, 10_000)
    res = verify_s6(evolve_cr_moments(FrequencyProfile.constant(0.7, 0.4), 0.0, 0.0, 3.0,
                                      t_eval=t))
    assert res.scaled_residual <= 1e-5


def test_cycle_requires_closure():
    prof = FrequencyProfile.sinusoidal(3.0, 1.0, 0.2, 1.0)
    with pytest.raises(CycleClosureError):
        run_cr_cycle(prof, 1.0, 0.5, 0.5)


def test_zero_length_cycle():
    prof = FrequencyProfile.sinusoidal(3.0, 1.0, 0.2, 1.0)
    assert run_cr_cycle(prof, 0.0, 0.5, 0.5).W == 0.0


def test_vacuum_cycle_work():
    prof = FrequencyProfile.sinusoidal(2.0, 1.0, 0.2, 1.5, common=0.1)
    t_c = 2 * math.pi / 1.5
    report = run_cr_cycle(prof, t_c, 0.0, 0.0)
    assert report.W == pytest.approx(-(3.0) * report.n_a_final, rel=1e-12)
    assert report.W < 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n_a0=st.floats(0.0, 3.0), n_b0=st.floats(0.0, 3.0))
def test_no_positive_work(seed, n_a0, n_b0):
    prof, t_c = random_closed_profile(np.random.default_rng(seed))
    assert run_cr_cycle(prof, t_c, n_a0, n_b0).W <= 1e-9
