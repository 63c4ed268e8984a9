"""Three resonant oscillators: a hot mode coupled to two cold ones.

Mode ``a`` couples to ``b`` and ``c`` with equal strength g. In the collective
basis B1 = (b + c)/sqrt(2), B2 = (b - c)/sqrt(2) only B1 couples to ``a``
(with strength sqrt(2) g) while B2 keeps its initial thermal occupation, so
the problem reduces to the two-mode dynamics of :mod:`qhe.mode_dynamics`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .mode_dynamics import evolve_modes
from .observables import bose_occupation, occupation_temperature
from .profile import FrequencyProfile

COLLECTIVE_COUPLING = math.sqrt(2.0)


@dataclass(frozen=True)
class ThreeModeState:
    q: float
    p: float
    n_a: float
    n_B1: float
    n_B2: float
    coherence_bc: complex


@dataclass(frozen=True)
class ThreeModeTrajectory:
    q: float
    p: float
    times: np.ndarray
    n_a: np.ndarray
    n_B1: np.ndarray
    n_B2: np.ndarray
    residuals: np.ndarray  # unitarity residuals of the (a, B1) mode coefficients

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i):
        state = ThreeModeState(self.q, self.p, float(self.n_a[i]), float(self.n_B1[i]),
                               float(self.n_B2[i]), 0j)
        return replace(state, coherence_bc=coherence_bc(state))

    @property
    def coherence(self):
        return 0.5 * (self.n_B1 - self.n_B2) + 0j


def swap_time(g=1.0):
    """First time at which cos(sqrt(2) g t) = 0."""
    return math.pi / (2 * COLLECTIVE_COUPLING * g)


def simulate_three_mode(q, p, t_end, tol=1e-10, *, omega=1.0, t_eval=None, fixed_step=None):
    """Evolve the hot mode and both cold modes from the product thermal state.

    ``q`` and ``p`` are omega/T_h and omega/T_c. The common frequency
    ``omega`` only contributes phases and does not affect occupations.
    """
    if not (q > 0 and p > 0):
        raise DomainError("q and p must be positive")
    traj = evolve_modes(FrequencyProfile.constant(omega), t_end, tol,
                        coupling=COLLECTIVE_COUPLING, t_eval=t_eval, fixed_step=fixed_step)
    nq, np_ = bose_occupation(q), bose_occupation(p)
    c2, d2 = np.abs(traj.C) ** 2, np.abs(traj.D) ** 2
    e2, f2 = np.abs(traj.E) ** 2, np.abs(traj.F) ** 2
    n_a = c2 * nq + f2 * np_
    n_B1 = d2 * nq + e2 * np_
    n_B2 = np.full(traj.times.shape, np_)
    res = np.column_stack(traj.samples.residuals())
    return ThreeModeTrajectory(q, p, traj.times, n_a, n_B1, n_B2, res)


def coherence_bc(state):
    """<b c^dag> = (n_B1 - n_B2)/2.

    B1 and B2 stay uncorrelated, so the cross terms of
    (B1 + B2)(B1^dag - B2^dag)/2 vanish. At the swap time this equals
    (1/(e^q - 1) - 1/(e^p - 1))/2; at other times it is the same algebra
    applied to the instantaneous collective occupations.
    """
    return complex(0.5 * (state.n_B1 - state.n_B2))


def swap_coherence(q, p):
    """Closed-form <b c^dag> at the swap time."""
    return 0.5 * (bose_occupation(q) - bose_occupation(p))


def three_mode_moment_oracle(q, p, times, *, omega=1.0, g=1.0):
    """Brute-force check in the original (a, b, c) basis.

    The correlation matrix G_ij = <a_i^dag a_j> of a number-conserving
    quadratic Hamiltonian with single-particle matrix h evolves as
    G(t) = exp(i h t) G(0) exp(-i h t). Returns ``(n_a, n_b, n_c, <b c^dag>)``.
    """
    h = np.array([[omega, g, g], [g, omega, 0.0], [g, 0.0, omega]])
    w, v = np.linalg.eigh(h)
    g0 = np.diag([bose_occupation(q), bose_occupation(p), bose_occupation(p)]).astype(complex)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.empty((len(times), 4), dtype=complex)
    for i, t in enumerate(times):
        u = (v * np.exp(1j * w * t)) @ v.T
        gt = u @ g0 @ u.conj().T
        out[i] = gt[0, 0], gt[1, 1], gt[2, 2], gt[2, 1]
    return out[:, 0].real, out[:, 1].real, out[:, 2].real, out[:, 3]


def collective_temperatures(state, omega=1.0):
    """Effective temperatures of B1 and B2; after the swap these are T_h and T_c."""
    return (float(occupation_temperature(state.n_B1, omega)),
            float(occupation_temperature(state.n_B2, omega)))
