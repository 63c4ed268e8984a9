"""Time-dependent oscillator frequencies omega_a(t), omega_b(t).

All quantities are in reduced units (hbar = k_B = g = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ProfileError

SHAPES = ("constant", "sinusoidal-detuning", "tabulated")


@dataclass(frozen=True)
class FrequencyProfile:
    """Frequencies of the two coupled modes as functions of time.

    For ``shape="sinusoidal-detuning"`` the modulation is split symmetrically
    between the modes,

        omega_a(t) = omega_a0 + (delta + common) * sin(nu t)
        omega_b(t) = omega_b0 + (common - delta) * sin(nu t)

    so the detuning is ``omega_a0 - omega_b0 + 2 delta sin(nu t)`` whatever
    ``common`` is. ``common`` (default 0) only shifts the mean frequency,
    which the rotating-wave dynamics ignores but the counter-rotating model
    does not.

    ``table`` rows are ``(t, omega_a, omega_b)`` with strictly increasing
    ``t``; values in between are linearly interpolated.
    """

    omega_a0: float
    omega_b0: float
    shape: str = "constant"
    delta: float = 0.0
    nu: float = 0.0
    common: float = 0.0
    table: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown profile shape {self.shape!r}; expected one of {SHAPES}")
        if self.shape == "tabulated":
            if self.table is None:
                raise ValueError("tabulated profile needs a table")
            table = np.array(self.table, dtype=float)
            if table.ndim != 2 or table.shape[1] != 3 or len(table) < 2:
                raise ValueError("table must have at least two rows of (t, omega_a, omega_b)")
            if not np.all(np.isfinite(table)):
                raise ProfileError("table contains non-finite entries")
            if np.any(np.diff(table[:, 0]) <= 0):
                raise ValueError("table times must be strictly increasing")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)
            object.__setattr__(self, "omega_a0", float(table[0, 1]))
            object.__setattr__(self, "omega_b0", float(table[0, 2]))
        if not (self.omega_a0 > 0 and self.omega_b0 > 0):
            raise ValueError("omega_a0 and omega_b0 must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if self.shape == "sinusoidal-detuning" and not self.nu > 0:
            raise ValueError("nu must be positive for a sinusoidal-detuning profile")
        if not all(math.isfinite(v) for v in (self.omega_a0, self.omega_b0, self.delta,
                                              self.nu, self.common)):
            raise ProfileError("profile parameters must be finite")

    @classmethod
    def constant(cls, omega_a, omega_b=None):
        return cls(omega_a, omega_a if omega_b is None else omega_b)

    @classmethod
    def sinusoidal(cls, omega_a0, omega_b0, delta, nu, common=0.0):
        return cls(omega_a0, omega_b0, "sinusoidal-detuning", delta, nu, common)

    @classmethod
    def tabulated(cls, rows):
        rows = np.asarray(rows, dtype=float)
        return cls(float(rows[0, 1]), float(rows[0, 2]), "tabulated", table=rows)

    @property
    def t_max(self):
        """Last time at which the profile is defined (inf unless tabulated)."""
        return float(self.table[-1, 0]) if self.shape == "tabulated" else math.inf

    def __call__(self, t):
        """Return ``(omega_a, omega_b)`` at scalar time ``t``."""
        if self.shape == "sinusoidal-detuning":
            s = math.sin(self.nu * t)
            return (self.omega_a0 + (self.delta + self.common) * s,
                    self.omega_b0 + (self.common - self.delta) * s)
        if self.shape == "constant":
            return self.omega_a0, self.omega_b0
        wa, wb = self.omegas(np.array([t]))
        return float(wa[0]), float(wb[0])

    def omegas(self, times):
        """Vectorised evaluation; returns arrays ``(omega_a, omega_b)``."""
        times = np.asarray(times, dtype=float)
        if self.shape == "constant":
            return (np.full(times.shape, self.omega_a0), np.full(times.shape, self.omega_b0))
        if self.shape == "sinusoidal-detuning":
            s = np.sin(self.nu * times)
            return (self.omega_a0 + (self.delta + self.common) * s,
                    self.omega_b0 + (self.common - self.delta) * s)
        tab = self.table
        slack = 1e-9 * max(1.0, abs(tab[-1, 0]))
        if np.any(times < tab[0, 0] - slack) or np.any(times > tab[-1, 0] + slack):
            raise ProfileError(
                f"tabulated profile evaluated outside [{tab[0, 0]}, {tab[-1, 0]}]")
        return np.interp(times, tab[:, 0], tab[:, 1]), np.interp(times, tab[:, 0], tab[:, 2])

    def detuning(self, times):
        wa, wb = self.omegas(times)
        return wa - wb

    def half_detuning(self, t):
        """(omega_a - omega_b)/2 at scalar ``t``; the only input of the rotating frame."""
        if self.shape == "sinusoidal-detuning":
            return 0.5 * (self.omega_a0 - self.omega_b0) + self.delta * math.sin(self.nu * t)
        wa, wb = self(t)
        return 0.5 * (wa - wb)

    def integral(self, times, weights=(0.5, 0.5)):
        """Exact ``int_0^t (w_a omega_a + w_b omega_b) dt'`` for each ``t`` in ``times``.

        The default weights give the mean-frequency phase. Tabulated profiles
        are integrated exactly as piecewise-linear functions.
        """
        wa_w, wb_w = weights
        times = np.asarray(times, dtype=float)
        base = wa_w * self.omega_a0 + wb_w * self.omega_b0
        if self.shape == "constant":
            return base * times
        if self.shape == "sinusoidal-detuning":
            amp = wa_w * (self.delta + self.common) + wb_w * (self.common - self.delta)
            return base * times + amp * (1.0 - np.cos(self.nu * times)) / self.nu
        tab = self.table
        self.omegas(times)  # range check
        w = wa_w * tab[:, 1] + wb_w * tab[:, 2]
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(tab[:, 0]))])
        i = np.clip(np.searchsorted(tab[:, 0], times, side="right") - 1, 0, len(tab) - 2)
        dt = times - tab[i, 0]
        slope = (w[i + 1] - w[i]) / (tab[i + 1, 0] - tab[i, 0])
        return cum[i] + w[i] * dt + 0.5 * slope * dt * dt

    def is_closed_at(self, t, atol=1e-9):
        """True if both frequencies at ``t`` equal their initial values."""
        wa, wb = self(t)
        scale = max(1.0, self.omega_a0, self.omega_b0)
        return abs(wa - self.omega_a0) <= atol * scale and abs(wb - self.omega_b0) <= atol * scale

    def max_abs_detuning(self, t_end):
        if self.shape == "constant":
            return abs(self.omega_a0 - self.omega_b0)
        if self.shape == "sinusoidal-detuning":
            return abs(self.omega_a0 - self.omega_b0) + 2 * self.delta
        rows = self.table[self.table[:, 0] <= t_end]
        return float(np.max(np.abs(rows[:, 1] - rows[:, 2])))
