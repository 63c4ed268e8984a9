import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhe.errors import DomainError, NumericalFailure
from qhe.mode_dynamics import evolve_modes
from qhe.observables import (ThermalInit, bose_occupation, effective_temperature,
                             evolve_occupations, mode_energies_equal_frequency,
                             moment_ode_oracle, occupation_temperature,
                             occupations_from_modes, reverse_flow_intervals,
                             temperature_crossings)
from qhe.profile import FrequencyProfile

# frozen with mpmath at 30 digits
BOSE_HALF = 1.5414940825367982
MIXED = 1.2536388698365566  # 0.7 n(0.5) + 0.3 n(1.0)


def test_bose_occupation_values():
    assert bose_occupation(0.5) == pytest.approx(BOSE_HALF, rel=1e-15)
    assert bose_occupation(math.log(2)) == pytest.approx(1.0, rel=1e-14)
    assert bose_occupation(50.0) == pytest.approx(math.exp(-50.0), rel=1e-12)


def test_bose_occupation_rejects_non_positive():
    with pytest.raises(DomainError):
        bose_occupation(0.0)
    with pytest.raises(DomainError):
        bose_occupation(np.array([1.0, -1.0]))


def test_occupations_at_initial_time():
    init = ThermalInit(0.5, 1.0)
    traj = evolve_modes(FrequencyProfile.constant(1.0), 1.0, t_eval=[0.0, 1.0])
    occ = occupations_from_modes(traj, init)
    assert occ.n_a[0] == pytest.approx(BOSE_HALF)
    assert occ.n_b[0] == pytest.approx(bose_occupation(1.0))


def test_partial_swap_mixture():
    # |C|^2 = cos^2(t) = 0.7 at t = arccos(sqrt 0.7)
    t = math.acos(math.sqrt(0.7))
    traj = evolve_modes(FrequencyProfile.constant(1.0), t, t_eval=[t])
    occ = occupations_from_modes(traj, ThermalInit(0.5, 1.0))
    assert occ.n_a[0] == pytest.approx(MIXED, abs=1e-9)


def test_thermal_swap_exchanges_temperatures():
    init = ThermalInit.from_temperatures(1.0, 3.0, 1.0, 0.8)
    traj = evolve_modes(FrequencyProfile.constant(1.0), math.pi / 2, t_eval=[math.pi / 2])
    occ = occupations_from_modes(traj, init)
    assert occupation_temperature(occ.n_a[0], 1.0) == pytest.approx(0.8, abs=1e-8)
    assert occupation_temperature(occ.n_b[0], 1.0) == pytest.approx(3.0, abs=1e-8)


def test_mode_energies_closed_form():
    init = ThermalInit(0.5, 1.0)
    Ea, Eb = mode_energies_equal_frequency(init, 2.0, math.pi / 2)
    assert Ea == pytest.approx(2.0 * bose_occupation(1.0))
    assert Eb == pytest.approx(2.0 * BOSE_HALF)


def test_effective_temperature_inverts_bose():
    for T in (0.1, 1.0, 7.5):
        E = 1.3 * bose_occupation(1.3 / T)
        assert effective_temperature(E, 1.3) == pytest.approx(T, rel=1e-12)


def test_effective_temperature_frozen_mode():
    assert effective_temperature(1e-320, 1.0) == 0.0


def test_effective_temperature_domain():
    with pytest.raises(DomainError):
        effective_temperature(0.0, 1.0)
    with pytest.raises(DomainError):
        effective_temperature(1.0, -1.0)


def test_mismatch_between_F_and_D_is_detected():
    traj = evolve_modes(FrequencyProfile.constant(1.0), 1.0, t_eval=[0.5, 1.0])
    bad = traj.coeffs.copy()
    bad[:, 3] *= 1.01
    corrupted = type(traj)(traj.times, bad, traj.profile, traj.g, traj.tol, traj.frame,
                           traj.solution)
    with pytest.raises(NumericalFailure):
        occupations_from_modes(corrupted, ThermalInit(0.5, 1.0))


def test_moment_oracle_agrees_with_modes():
    prof = FrequencyProfile.sinusoidal(3.0, 1.0, 0.2, 2 * math.sqrt(2))
    init = ThermalInit(0.75, 1.0)
    times = np.linspace(0, 25, 251)
    _, occ = evolve_occupations(prof, init, 25.0, t_eval=times)
    ref = moment_ode_oracle(prof, init, 25.0, times)
    assert np.max(np.abs(occ.n_a - ref.n_a)) < 1e-8
    assert np.max(np.abs(occ.n_b - ref.n_b)) < 1e-8


def test_temperature_crossings_and_reverse_flow():
    init = ThermalInit.from_temperatures(1.0, 3.0, 1.0, 1.0)
    times = np.linspace(0, math.pi, 2001)
    Ea, Eb = mode_energies_equal_frequency(init, 1.0, times)
    Ta, Tb = effective_temperature(Ea, 1.0), effective_temperature(Eb, 1.0)
    crossings = temperature_crossings(times, Ta, Tb)
    assert crossings[0] == pytest.approx(math.pi / 4, abs=1e-3)
    # after the crossing the now-colder mode a keeps cooling: heat flows "uphill"
    intervals = reverse_flow_intervals(times, Ta, Tb)
    assert any(lo <= 1.0 <= hi for lo, hi in intervals)


@settings(max_examples=15, deadline=None)
@given(q=st.floats(0.05, 5.0), p=st.floats(0.05, 5.0), delta=st.floats(0.0, 0.5),
       nu=st.floats(0.5, 4.0))
def test_total_occupation_conserved(q, p, delta, nu):
    prof = FrequencyProfile.sinusoidal(2.0, 1.0, delta, nu)
    _, occ = evolve_occupations(prof, ThermalInit(q, p), 12.0)
    scale = max(1.0, occ.total[0])
    assert occ.conservation_residual() < 1e-8 * scale
