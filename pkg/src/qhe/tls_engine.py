"""Quantum heat engine with two coupled two-level atoms.

Atoms ``a`` and ``b`` with transition frequencies omega_a(t), omega_b(t)
exchange excitations through g (sigma^dag pi + sigma pi^dag). The density
matrix is kept in the basis |ee>, |eg>, |ge>, |gg> (first letter: atom a)
with sigma_z |e> = +|e>, so n_a = rho_00 + rho_11 and n_b = rho_00 + rho_22.

The initial product of Gibbs states commutes with the total excitation
number N, and so does the Hamiltonian. Hence rho(t) commutes with N, and
the frame rotating at the mean frequency (generated by N) leaves rho
unchanged. The equations are integrated in that frame, where only the
detuning enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError, NumericalFailure, ProfileError, ResolutionError
from .integrate import integrate
from .mode_dynamics import _check_tol, local_tolerance
from .photonic_engine import _report
from .profile import FrequencyProfile

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-8
BRACKET_TOL = 1e-8
MIN_POINTS_PER_PERIOD = 20

_N_A = np.array([1.0, 1.0, 0.0, 0.0])
_N_B = np.array([1.0, 0.0, 1.0, 0.0])


def fermi_occupation(omega, T):
    """Excited-state probability 1/(e^{omega/T} + 1) of a thermal two-level atom."""
    omega = np.asarray(omega, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(~(omega > 0)) or np.any(~(T > 0)):
        raise DomainError("fermi_occupation needs omega > 0 and T > 0")
    # 1/(e^x + 1) = expit(-x); written this way it never overflows
    x = omega / T
    out = 0.5 * (1.0 - np.tanh(0.5 * x))
    return float(out) if out.ndim == 0 else out


def gibbs_product(omega_a, T_a, omega_b, T_b):
    """Diagonal density matrix of two independent thermal atoms."""
    na, nb = fermi_occupation(omega_a, T_a), fermi_occupation(omega_b, T_b)
    return np.diag([na * nb, na * (1 - nb), (1 - na) * nb, (1 - na) * (1 - nb)]).astype(complex)


def hamiltonian(omega_a, omega_b, g=1.0):
    """Lab-frame Hamiltonian in the |ee>, |eg>, |ge>, |gg> basis."""
    s, d = 0.5 * (omega_a + omega_b), 0.5 * (omega_a - omega_b)
    h = np.diag([s, d, -d, -s]).astype(complex)
    h[1, 2] = h[2, 1] = g
    return h


@dataclass(frozen=True)
class TwoQubitState:
    rho: np.ndarray

    @property
    def n_a(self):
        return float(np.real(np.diagonal(self.rho)) @ _N_A)

    @property
    def n_b(self):
        return float(np.real(np.diagonal(self.rho)) @ _N_B)

    @property
    def purity(self):
        return float(np.real(np.vdot(self.rho, self.rho)))


@dataclass(frozen=True)
class TwoQubitTrajectory:
    """Density matrices ``rho[i]`` at ``times[i]`` and the derived occupations."""

    times: np.ndarray
    rho: np.ndarray
    profile: FrequencyProfile
    T_h: float
    T_c: float
    g: float = 1.0

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i):
        return TwoQubitState(self.rho[i])

    @property
    def populations(self):
        return np.real(np.diagonal(self.rho, axis1=1, axis2=2))

    @property
    def n_a(self):
        return self.populations @ _N_A

    @property
    def n_b(self):
        return self.populations @ _N_B

    @property
    def purity(self):
        return np.real(np.einsum("nij,nij->n", self.rho, self.rho.conj()))

    def check(self):
        """Hermiticity, trace and positivity diagnostics, maximised over samples."""
        herm = float(np.max(np.abs(self.rho - np.conj(np.swapaxes(self.rho, 1, 2)))))
        trace = float(np.max(np.abs(np.trace(self.rho, axis1=1, axis2=2) - 1.0)))
        hermitian = 0.5 * (self.rho + np.conj(np.swapaxes(self.rho, 1, 2)))
        min_eig = float(np.min(np.linalg.eigvalsh(hermitian)))
        return {"hermiticity": herm, "trace": trace, "min_eigenvalue": min_eig}


def evolve_two_qubits(profile, T_h, T_c, t_end, tol=1e-10, *, g=1.0, t_eval=None,
                      fixed_step=None):
    """Von Neumann evolution from Gibbs(omega_a0, T_h) x Gibbs(omega_b0, T_c).

    Raises :class:`NumericalFailure` if any sample has an eigenvalue below
    -1e-8 or loses Hermiticity or trace beyond round-off.
    """
    if not (T_h > 0 and T_c > 0):
        raise DomainError("temperatures must be positive")
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    _check_tol(tol)
    if t_end > profile.t_max * (1 + 1e-12):
        raise ProfileError(f"profile is tabulated only up to t={profile.t_max}")
    rho0 = gibbs_product(profile.omega_a0, T_h, profile.omega_b0, T_c)
    half = profile.half_detuning
    h = np.zeros((4, 4), dtype=complex)
    h[1, 2] = h[2, 1] = g

    def rhs(t, y):
        d = half(t)
        h[1, 1], h[2, 2] = d, -d
        rho = y.reshape(4, 4)
        return (-1j * (h @ rho - rho @ h)).ravel()

    sol = integrate(rhs, t_end, rho0.ravel(), tol=local_tolerance(tol, t_end),
                    fixed_step=fixed_step)
    if t_eval is None:
        times, y = sol.t, sol.y
    else:
        times = np.asarray(t_eval, dtype=float)
        y = sol(times)
    traj = TwoQubitTrajectory(times, y.reshape(-1, 4, 4), profile, T_h, T_c, g)
    diag = traj.check()
    if diag["min_eigenvalue"] < -POSITIVITY_TOL:
        raise NumericalFailure(f"density matrix lost positivity: {diag['min_eigenvalue']:.3e}")
    if diag["hermiticity"] > HERMITICITY_TOL or diag["trace"] > TRACE_TOL:
        raise NumericalFailure(f"density matrix drifted: {diag}")
    return traj


def exact_two_qubits(omega_a, omega_b, T_h, T_c, times, g=1.0):
    """Oracle for constant frequencies: rho(t) = U rho0 U^dag by exact diagonalisation."""
    w, v = np.linalg.eigh(hamiltonian(omega_a, omega_b, g))
    rho0 = gibbs_product(omega_a, T_h, omega_b, T_c)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    u = np.einsum("ij,nj,kj->nik", v, np.exp(-1j * np.multiply.outer(times, w)), v.conj())
    return u @ rho0 @ np.conj(np.swapaxes(u, 1, 2))


def rabi_period(profile, t_end, g=1.0):
    """Shortest population-oscillation period pi / sqrt(g^2 + Delta_max^2/4)."""
    d = profile.max_abs_detuning(t_end)
    return math.pi / math.sqrt(g * g + 0.25 * d * d)


@dataclass(frozen=True)
class IdentityResidual:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def residual(self):
        return np.abs(self.lhs - self.rhs)

    @property
    def max_residual(self):
        return float(np.max(self.residual))

    @property
    def scaled_residual(self):
        """Max residual over max(1, |lhs|, |rhs|); equals the absolute one for bounded sides."""
        scale = max(1.0, float(np.max(np.abs(self.lhs))), float(np.max(np.abs(self.rhs))))
        return self.max_residual / scale


def verify_p20(traj):
    """Check (n_a')^2 + (int_0^t phi' n_a' dt')^2 = 4 g^2 (n_a(0) - n_a)(n_a - n_b(0)).

    Here phi' = omega_b - omega_a. Derivatives are centred differences and the
    integral is the trapezoid rule on the trajectory's own grid, which must
    resolve the Rabi period with at least 20 points.
    """
    t = np.asarray(traj.times, dtype=float)
    if len(t) < 3:
        raise ResolutionError("need at least three samples")
    period = rabi_period(traj.profile, t[-1], traj.g)
    if np.max(np.diff(t)) > period / MIN_POINTS_PER_PERIOD:
        raise ResolutionError(
            f"grid spacing {np.max(np.diff(t)):.3g} exceeds period/{MIN_POINTS_PER_PERIOD}"
            f" = {period / MIN_POINTS_PER_PERIOD:.3g}")
    n_a, n_b = traj.n_a, traj.n_b
    dn = np.gradient(n_a, t, edge_order=2)
    phi_dot = -traj.profile.detuning(t)
    inner = cumulative_trapezoid(phi_dot * dn, t, initial=0.0)
    lhs = dn ** 2 + inner ** 2
    rhs = 4 * traj.g ** 2 * (n_a[0] - n_a) * (n_a - n_b[0])
    return IdentityResidual(t, lhs, rhs)


def run_tls_cycle(spec, t_c):
    """One stroke of the two-atom engine; W, Q and eta as for the photonic cycle.

    ``d_sq`` is the transferred fraction (n_a(0) - n_a(t_c))/(n_a(0) - n_b(0)),
    NaN when the initial occupations coincide.
    """
    if not t_c >= 0:
        raise DomainError("t_c must be non-negative")
    n_a0 = fermi_occupation(spec.omega_a0, spec.T_h)
    n_b0 = fermi_occupation(spec.omega_b0, spec.T_c)
    lo, hi = min(n_a0, n_b0), max(n_a0, n_b0)
    if t_c == 0:
        n_a, n_b, excursion = n_a0, n_b0, 0.0
    else:
        traj = evolve_two_qubits(spec.profile(), spec.T_h, spec.T_c, t_c, spec.tol,
                                 fixed_step=spec.fixed_step)
        n_a, n_b = float(traj.n_a[-1]), float(traj.n_b[-1])
        # n_a stays between the initial occupations throughout the stroke
        excursion = float(max(0.0, np.max(traj.n_a) - hi, lo - np.min(traj.n_a)))
    if excursion > BRACKET_TOL:
        raise NumericalFailure(
            f"n_a left the bracket [{lo!r}, {hi!r}] by {excursion:.3e}")
    d_sq = (n_a0 - n_a) / (n_a0 - n_b0) if n_a0 != n_b0 else math.nan
    wa, wb = spec.profile()(t_c)
    offset = max(abs(wa - spec.omega_a0), abs(wb - spec.omega_b0))
    return _report(spec.omega_a0, spec.omega_b0, n_a0, n_b0, n_a, n_b, t_c=float(t_c),
                   d_sq=d_sq, eta_carnot=spec.eta_carnot, closure_offset=offset,
                   extra={"bracket_excursion": excursion})
