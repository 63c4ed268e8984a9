"""Occupations, energies and effective temperatures from mode trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NumericalFailure
from .mode_dynamics import _check_tol, evolve_modes

_FROZEN_ENERGY = 1e-300


@dataclass(frozen=True)
class ThermalInit:
    """Initial inverse-temperature parameters q = omega_a/T_a, p = omega_b/T_b."""

    q: float
    p: float

    def __post_init__(self):
        if not (self.q > 0 and self.p > 0):
            raise DomainError("q and p must be positive")

    @classmethod
    def from_temperatures(cls, omega_a, T_a, omega_b, T_b):
        return cls(omega_a / T_a, omega_b / T_b)

    @property
    def n_a0(self):
        return bose_occupation(self.q)

    @property
    def n_b0(self):
        return bose_occupation(self.p)


@dataclass(frozen=True)
class OccupationSeries:
    times: np.ndarray
    n_a: np.ndarray
    n_b: np.ndarray

    @property
    def total(self):
        return self.n_a + self.n_b

    def conservation_residual(self):
        return float(np.max(np.abs(self.total - self.total[0])))


def bose_occupation(x):
    """1/(e^x - 1) for x > 0; accepts arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("bose_occupation needs x > 0")
    out = 1.0 / np.expm1(arr)
    return float(out) if arr.ndim == 0 else out


def occupations_from_modes(traj, init, *, check_tol=None):
    """n_a, n_b on the trajectory's sample grid.

    Inverting the unitary mode transform gives a = C* A + F* B and
    b = D* A + E* B, and A, B stay thermal with parameters q, p, so

        n_a = |C|^2 n(q) + |F|^2 n(p),   n_b = |D|^2 n(q) + |E|^2 n(p).

    Unitarity also demands |F| = |D|; the identity is checked at runtime.
    """
    nq, np_ = init.n_a0, init.n_b0
    c2 = np.abs(traj.C) ** 2
    d2 = np.abs(traj.D) ** 2
    e2 = np.abs(traj.E) ** 2
    f2 = np.abs(traj.F) ** 2
    if check_tol is None:
        check_tol = max(1e-9, 10 * traj.tol)
    mismatch = float(np.max(np.abs(np.sqrt(f2) - np.sqrt(d2))))
    if mismatch > check_tol:
        raise NumericalFailure(f"|F| and |D| differ by {mismatch:.3e} (> {check_tol:.1e})")
    return OccupationSeries(traj.times, c2 * nq + f2 * np_, d2 * nq + e2 * np_)


def mode_energies_equal_frequency(init, omega, t, g=1.0):
    """Mean energies (E_a, E_b) of two resonant oscillators at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    c2 = np.cos(g * t) ** 2
    s2 = np.sin(g * t) ** 2
    nq, np_ = init.n_a0, init.n_b0
    return omega * (c2 * nq + s2 * np_), omega * (c2 * np_ + s2 * nq)


def effective_temperature(E, omega):
    """Temperature whose Bose occupation at ``omega`` carries mean energy ``E``.

    Energies below 1e-300 are treated as a frozen mode at zero temperature.
    """
    E = np.asarray(E, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if np.any(~(E > 0)):
        raise DomainError("effective_temperature needs E > 0")
    if np.any(~(omega > 0)):
        raise DomainError("effective_temperature needs omega > 0")
    with np.errstate(over="ignore", divide="ignore"):
        out = np.where(E < _FROZEN_ENERGY, 0.0, omega / np.log1p(omega / np.maximum(E, _FROZEN_ENERGY)))
    return float(out) if out.ndim == 0 else out


def occupation_temperature(n, omega):
    """Effective temperature from an occupation number rather than an energy."""
    return effective_temperature(np.asarray(n) * omega, omega)


def moment_ode_oracle(profile, init, t_end, times=None, *, rtol=1e-12, atol=1e-13):
    """Independent route to n_a(t), n_b(t): the closed first-moment equations.

    With s = <a^dag b> the Heisenberg equations of the coupled-mode Hamiltonian
    close on (n_a, n_b, s):

        n_a' = 2 g Im s,   n_b' = -2 g Im s,
        s'   = i (omega_a - omega_b) s + i g (n_b - n_a).

    Integrated with SciPy's DOP853, so neither the equations nor the
    integrator are shared with :func:`occupations_from_modes`.
    """
    if not t_end >= 0:
        raise DomainError("t_end must be non-negative")
    if times is None:
        times = np.linspace(0.0, t_end, 201)
    times = np.asarray(times, dtype=float)
    g = 1.0

    def rhs(t, y):
        wa, wb = profile(t)
        na, nb, sr, si = y
        dw = wa - wb
        return [2 * g * si, -2 * g * si, -dw * si, dw * sr + g * (nb - na)]

    y0 = [init.n_a0, init.n_b0, 0.0, 0.0]
    if t_end == 0:
        return OccupationSeries(times, np.full(times.shape, y0[0]), np.full(times.shape, y0[1]))
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", t_eval=times,
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericalFailure(sol.message)
    return OccupationSeries(times, sol.y[0], sol.y[1])


def reverse_flow_intervals(times, T_a, T_b):
    """Intervals where the colder mode cools while the hotter one warms.

    Returned as a list of ``(t_start, t_end)`` pairs on the sample grid.
    """
    times = np.asarray(times)
    dTa = np.gradient(T_a, times)
    dTb = np.gradient(T_b, times)
    a_colder = T_a < T_b
    cold_rate = np.where(a_colder, dTa, dTb)
    hot_rate = np.where(a_colder, dTb, dTa)
    flag = (cold_rate < 0) & (hot_rate > 0) & (T_a != T_b)
    intervals = []
    start = None
    for i, f in enumerate(flag):
        if f and start is None:
            start = times[i]
        elif not f and start is not None:
            intervals.append((float(start), float(times[i - 1])))
            start = None
    if start is not None:
        intervals.append((float(start), float(times[-1])))
    return intervals


def temperature_crossings(times, T_a, T_b):
    """Times where T_a - T_b changes sign, by linear interpolation."""
    diff = np.asarray(T_a) - np.asarray(T_b)
    idx = np.nonzero(np.sign(diff[:-1]) * np.sign(diff[1:]) < 0)[0]
    t = np.asarray(times)
    return [float(t[i] - diff[i] * (t[i + 1] - t[i]) / (diff[i + 1] - diff[i])) for i in idx]


def evolve_occupations(profile, init, t_end, tol=1e-10, **kwargs):
    """Convenience: integrate modes and map them to occupations."""
    _check_tol(tol)
    traj = evolve_modes(profile, t_end, tol, **kwargs)
    return traj, occupations_from_modes(traj, init)

