"""Mode-coefficient dynamics of two coupled oscillators.

The time-evolved mode operators are written as

    A(t) = C a + D b,        B(t) = E b + F a,

and the coefficients obey the time-reversed equations

    i C' = -omega_a C - g D,   i D' = -omega_b D - g C,
    i E' = -omega_b E - g F,   i F' = -omega_a F - g E,

with (C, D, E, F)(0) = (1, 0, 1, 0). Unitarity makes
|C|^2 + |D|^2, |E|^2 + |F|^2 and C F* + D E* integrals of motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ProfileError
from .integrate import Solution, integrate
from .profile import FrequencyProfile

TOL_RANGE = (1e-13, 1e-4)
INITIAL = np.array([1.0, 0.0, 1.0, 0.0], dtype=complex)
_SWAP = np.array([1, 0, 3, 2])
_SIGN = np.array([1.0, -1.0, -1.0, 1.0])


@dataclass(frozen=True)
class ModeCoefficients:
    """Complex amplitudes of the evolved mode operators; fields may be arrays."""

    C: complex
    D: complex
    E: complex
    F: complex

    @classmethod
    def from_array(cls, y):
        y = np.asarray(y)
        return cls(y[..., 0], y[..., 1], y[..., 2], y[..., 3])

    def as_array(self):
        return np.stack(np.broadcast_arrays(self.C, self.D, self.E, self.F), axis=-1)

    def residuals(self):
        """``(r1, r2, r3)``: deviations from the three unitarity identities."""
        r1 = np.abs(np.abs(self.C) ** 2 + np.abs(self.D) ** 2 - 1.0)
        r2 = np.abs(np.abs(self.E) ** 2 + np.abs(self.F) ** 2 - 1.0)
        r3 = np.abs(self.C * np.conj(self.F) + self.D * np.conj(self.E))
        return r1, r2, r3


@dataclass(frozen=True)
class ModeTrajectory:
    """Sampled mode coefficients plus a continuous interpolant.

    ``coeffs[i]`` holds ``(C, D, E, F)`` at ``times[i]``. :meth:`at` evaluates
    the integrator's dense output anywhere in ``[0, times[-1]]``.
    """

    times: np.ndarray
    coeffs: np.ndarray
    profile: FrequencyProfile
    g: float
    tol: float
    frame: str
    solution: Solution

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i):
        return ModeCoefficients.from_array(self.coeffs[i])

    @property
    def samples(self):
        return ModeCoefficients.from_array(self.coeffs)

    @property
    def C(self):
        return self.coeffs[:, 0]

    @property
    def D(self):
        return self.coeffs[:, 1]

    @property
    def E(self):
        return self.coeffs[:, 2]

    @property
    def F(self):
        return self.coeffs[:, 3]

    @property
    def t_end(self):
        return float(self.solution.t[-1])

    def at(self, times):
        """Lab-frame coefficients at arbitrary ``times``, shape ``(n, 4)``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        y = self.solution(times)
        if self.frame == "rotating":
            y = y * np.exp(1j * self.profile.integral(times))[:, None]
        return y


def _check_tol(tol):
    lo, hi = TOL_RANGE
    if not (lo <= tol <= hi):
        raise DomainError(f"tol={tol!r} outside [{lo:g}, {hi:g}]")


def local_tolerance(tol, t_end):
    """Per-step error target that keeps the accumulated drift within ``tol``.

    The global error of an adaptive run grows roughly linearly with the number
    of steps, so the per-step target is tightened in proportion to the span.
    """
    return tol / max(1.0, t_end)


def evolve_modes(profile, t_end, tol=1e-10, *, coupling=1.0, t_eval=None,
                 fixed_step=None, frame="rotating"):
    """Integrate the mode-coefficient equations from 0 to ``t_end``.

    By default the equations are solved in the frame rotating at the mean
    frequency (omega_a + omega_b)/2; only the detuning then enters the
    integration and the common phase is restored exactly from the profile.
    ``frame="lab"`` integrates the equations as written above instead.

    ``t_eval`` selects the sample times (the integrator's own steps when
    omitted). ``fixed_step`` switches to classical RK4 on that step.
    """
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    _check_tol(tol)
    if frame not in ("rotating", "lab"):
        raise ValueError(f"unknown frame {frame!r}")
    if t_end > profile.t_max * (1 + 1e-12):
        raise ProfileError(f"profile is tabulated only up to t={profile.t_max}")
    g = float(coupling)

    if frame == "rotating":
        half = profile.half_detuning

        def rhs(t, y):
            return 1j * (half(t) * _SIGN * y + g * y[_SWAP])
    else:
        def rhs(t, y):
            wa, wb = profile(t)
            return 1j * (np.array([wa, wb, wb, wa]) * y + g * y[_SWAP])

    sol = integrate(rhs, t_end, INITIAL, tol=local_tolerance(tol, t_end), fixed_step=fixed_step)
    if t_eval is None:
        times = sol.t
        y = sol.y
    else:
        times = np.asarray(t_eval, dtype=float)
        y = sol(times)
    if frame == "rotating":
        y = y * np.exp(1j * profile.integral(times))[:, None]
    return ModeTrajectory(times, y, profile, g, tol, frame, sol)


def rabi_closed_form(omega, t, g=1.0):
    """Resonant solution ``C = E = e^{i omega t} cos(g t)``, ``D = F = i e^{i omega t} sin(g t)``."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    t = np.asarray(t, dtype=float)
    phase = np.exp(1j * omega * t)
    c = phase * np.cos(g * t)
    s = 1j * phase * np.sin(g * t)
    return ModeCoefficients(c, s, c, s)


def _expm_i_sym(m, t):
    # exp(i m t) for real symmetric 2x2 m, vectorised over t
    w, v = np.linalg.eigh(m)
    ph = np.exp(1j * np.multiply.outer(np.atleast_1d(t), w))  # (n, 2)
    return np.einsum("ij,nj,kj->nik", v, ph, v)


def constant_profile_oracle(omega_a, omega_b, t, g=1.0):
    """Exact coefficients for constant frequencies via the 2x2 matrix exponential."""
    t = np.asarray(t, dtype=float)
    u_cd = _expm_i_sym(np.array([[omega_a, g], [g, omega_b]]), t)
    u_ef = _expm_i_sym(np.array([[omega_b, g], [g, omega_a]]), t)
    coeffs = ModeCoefficients(u_cd[:, 0, 0], u_cd[:, 1, 0], u_ef[:, 0, 0], u_ef[:, 1, 0])
    if t.ndim == 0:
        return ModeCoefficients(*(complex(x[0]) for x in (coeffs.C, coeffs.D, coeffs.E, coeffs.F)))
    return coeffs


def unitarity_residuals(traj):
    """Per-sample ``(r1, r2, r3)`` as an ``(n, 3)`` array."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    return np.column_stack(traj.samples.residuals())


def generalized_rabi_frequency(detuning, g=1.0):
    """Omega = sqrt(g^2 + detuning^2/4)."""
    return math.sqrt(g * g + 0.25 * detuning * detuning)
