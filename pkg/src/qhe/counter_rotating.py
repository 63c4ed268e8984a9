"""Two oscillators with a counter-rotating (pair-creating) coupling.

With H = omega_a a^dag a + omega_b b^dag b + g (a^dag b^dag + a b) the
Heisenberg equations close on the occupations and the anomalous
correlator m = <a b>:

    n_a' = n_b' = -2 g Im m,
    i m' = (omega_a + omega_b) m + g (1 + n_a + n_b).

The closure is exact because H is quadratic. n_a - n_b is conserved and,
starting from m = 0, (N + 1)^2 - 4|m|^2 is too (N = n_a + n_b), so the
total occupation never drops below its initial value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import eigh_tridiagonal

from .errors import (CycleClosureError, DomainError, NumericalFailure, ProfileError,
                     ResolutionError, TruncationError)
from .integrate import integrate
from .mode_dynamics import _check_tol, local_tolerance
from .photonic_engine import _report
from .profile import FrequencyProfile
from .tls_engine import MIN_POINTS_PER_PERIOD, IdentityResidual

WORK_TOL = 1e-9
TAIL_TOL = 1e-10
N_MAX_DEFAULT = 60
N_MAX_LIMIT = 8192
MAX_CYCLE_DURATION = 6.0  # with N0 <= 6, keeps N + 1 <= 7 e^12 ~ 1e6


@dataclass(frozen=True)
class CRMomentState:
    n_a: float
    n_b: float
    m: complex


@dataclass(frozen=True)
class CRTrajectory:
    times: np.ndarray
    n_a: np.ndarray
    n_b: np.ndarray
    m: np.ndarray
    profile: FrequencyProfile
    g: float = 1.0

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i):
        return CRMomentState(float(self.n_a[i]), float(self.n_b[i]), complex(self.m[i]))

    @property
    def total(self):
        return self.n_a + self.n_b

    def difference_drift(self):
        d = self.n_a - self.n_b
        return float(np.max(np.abs(d - d[0])))

    def floor_violation(self):
        """How far n_a + n_b dips below its initial value (0 if never)."""
        return float(max(0.0, self.total[0] - np.min(self.total)))

    def invariant_drift(self):
        inv = (self.total + 1) ** 2 - 4 * np.abs(self.m) ** 2
        return float(np.max(np.abs(inv - inv[0])))


def evolve_cr_moments(profile, n_a0, n_b0, t_end, tol=1e-10, *, g=1.0, t_eval=None,
                      fixed_step=None):
    """Integrate the closed moment equations from a thermal product state (m = 0)."""
    if not (n_a0 >= 0 and n_b0 >= 0):
        raise DomainError("initial occupations must be non-negative")
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    _check_tol(tol)
    if t_end > profile.t_max * (1 + 1e-12):
        raise ProfileError(f"profile is tabulated only up to t={profile.t_max}")

    def rhs(t, y):
        wa, wb = profile(t)
        s = wa + wb
        n_a, n_b, mr, mi = y
        return np.array([-2 * g * mi, -2 * g * mi, s * mi, -s * mr - g * (1 + n_a + n_b)])

    y0 = np.array([n_a0, n_b0, 0.0, 0.0], dtype=float)
    sol = integrate(rhs, t_end, y0, tol=local_tolerance(tol, t_end), fixed_step=fixed_step)
    if t_eval is None:
        times, y = sol.t, sol.y
    else:
        times = np.asarray(t_eval, dtype=float)
        y = sol(times)
    return CRTrajectory(times, y[:, 0], y[:, 1], y[:, 2] + 1j * y[:, 3], profile, g)


def verify_s6(traj, profile=None):
    """Check N'^2 + (int_0^t phi' N' dt')^2 = 4 g^2 ((N + 1)^2 - (N(0) + 1)^2).

    phi' = omega_a + omega_b; centred differences and trapezoid quadrature on
    the trajectory grid, which must resolve the fastest oscillation with at
    least 20 points.
    """
    profile = traj.profile if profile is None else profile
    t = np.asarray(traj.times, dtype=float)
    if len(t) < 3:
        raise ResolutionError("need at least three samples")
    wa, wb = profile.omegas(t)
    phi_dot = wa + wb
    # the anomalous correlator rotates at phi' and its envelope at up to ~2g
    fastest = max(float(np.max(np.abs(phi_dot))), 2 * traj.g)
    period = 2 * math.pi / fastest
    if np.max(np.diff(t)) > period / MIN_POINTS_PER_PERIOD:
        raise ResolutionError(
            f"grid spacing {np.max(np.diff(t)):.3g} exceeds period/{MIN_POINTS_PER_PERIOD}")
    N = traj.total
    dN = np.gradient(N, t, edge_order=2)
    inner = cumulative_trapezoid(phi_dot * dN, t, initial=0.0)
    lhs = dN ** 2 + inner ** 2
    rhs = 4 * traj.g ** 2 * ((N + 1) ** 2 - (N[0] + 1) ** 2)
    return IdentityResidual(t, lhs, rhs)


def run_cr_cycle(profile, t_c, n_a0, n_b0, tol=1e-10, *, fixed_step=None):
    """Close a stroke and report W = omega_a0 (n_a0 - n_a) + omega_b0 (n_b0 - n_b).

    The frequencies must be back at their initial values at ``t_c``. Raises
    :class:`NumericalFailure` if W exceeds 1e-9, which the dynamics forbid.
    """
    if not t_c >= 0:
        raise DomainError("t_c must be non-negative")
    if not profile.is_closed_at(t_c):
        wa, wb = profile(t_c)
        raise CycleClosureError(
            f"profile not closed at t_c={t_c}: ({wa}, {wb}) vs "
            f"({profile.omega_a0}, {profile.omega_b0})")
    if t_c == 0:
        n_a, n_b = n_a0, n_b0
    else:
        traj = evolve_cr_moments(profile, n_a0, n_b0, t_c, tol, fixed_step=fixed_step)
        n_a, n_b = float(traj.n_a[-1]), float(traj.n_b[-1])
    wa, wb = profile(t_c)
    report = _report(profile.omega_a0, profile.omega_b0, n_a0, n_b0, n_a, n_b,
                     t_c=float(t_c), d_sq=math.nan, eta_carnot=math.nan, conserving=False,
                     closure_offset=max(abs(wa - profile.omega_a0), abs(wb - profile.omega_b0)))
    if report.W > WORK_TOL:
        raise NumericalFailure(f"counter-rotating cycle produced W={report.W!r} > 0")
    return report


def random_closed_profile(rng, *, periods=None, max_duration=MAX_CYCLE_DURATION):
    """A sinusoidal profile with a common-mode component and a closing time k pi / nu.

    Since |m| <= (N + 1)/2, the total obeys N + 1 <= (N0 + 1) exp(2 g t). The
    closing time is kept below ``max_duration`` so that occupations stay small
    enough (about 1e6 at most) for float64 to resolve n_a - n_b to 1e-9.
    """
    omega_b0 = rng.uniform(0.2, 2.0)
    omega_a0 = omega_b0 + rng.uniform(0.0, 2.0)
    delta = rng.uniform(0.0, 0.5 * omega_b0)
    common = rng.uniform(-0.4, 0.4) * omega_b0
    nu = rng.uniform(math.pi / max_duration, 4.0)
    k_max = min(8, int(max_duration * nu / math.pi))
    k = int(rng.integers(1, k_max + 1)) if periods is None else periods
    return FrequencyProfile.sinusoidal(omega_a0, omega_b0, delta, nu, common), k * math.pi / nu


def _pair_propagate(sum_omega, times, n_max, g):
    # pair states |k, k>, k = 0..n_max: <k+1,k+1| a^dag b^dag |k,k> = k + 1
    k = np.arange(n_max + 1, dtype=float)
    w, v = eigh_tridiagonal(sum_omega * k, g * (k[:-1] + 1))
    amp = (v * v[0]) @ np.exp(-1j * np.multiply.outer(w, times))  # (n_max+1, n_t)
    return k, np.abs(amp) ** 2


def fock_oracle_cr(omega_a, omega_b, t, n_max=N_MAX_DEFAULT, *, g=1.0, auto=True):
    """Occupations from vacuum by exact propagation in a truncated Fock space.

    From the vacuum only pair states |k, k> are reachable, so the truncated
    Hamiltonian is tridiagonal in that basis and is diagonalised exactly. The
    top tenth of the levels must hold less than 1e-10 of the population; with
    ``auto`` the cut-off doubles until it does, otherwise
    :class:`TruncationError` is raised. Returns ``(n_a, n_b)``.
    """
    if n_max < 20:
        raise DomainError("n_max must be at least 20")
    times = np.atleast_1d(np.asarray(t, dtype=float))
    while True:
        k, pop = _pair_propagate(omega_a + omega_b, times, n_max, g)
        edge = int(math.ceil(0.9 * (n_max + 1)))
        tail = float(np.max(np.sum(pop[edge:], axis=0)))
        if tail < TAIL_TOL:
            break
        if not auto or 2 * n_max > N_MAX_LIMIT:
            raise TruncationError(f"tail population {tail:.2e} with n_max={n_max}")
        n_max *= 2
    n = k @ pop
    if np.ndim(t) == 0:
        return float(n[0]), float(n[0])
    return n, n.copy()
