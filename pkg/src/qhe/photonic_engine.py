"""Photonic heat-engine cycle with two coupled cavity modes.

At the start of a cycle mode ``a`` is thermal at T_h and mode ``b`` at T_c.
The modes are then coupled and isolated while their frequencies are driven,
and return to ``omega_a0``, ``omega_b0`` at the end of the stroke. Because
n_a + n_b is conserved, W = (omega_a0 - omega_b0)(n_a(0) - n_a(t_c)) and the
efficiency is always 1 - omega_b0/omega_a0.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import argrelmin

from .errors import DomainError, NoResonanceError, NumericalFailure, ResonanceMissError
from .mode_dynamics import _check_tol, evolve_modes
from .observables import ThermalInit, bose_occupation, occupations_from_modes
from .profile import FrequencyProfile

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
TIME_RESOLUTION = 1e-6
ZERO_HEAT = 1e-15


@dataclass(frozen=True)
class CycleSpec:
    """Parameters of one engine stroke.

    ``nu`` defaults to the parametric-resonance frequency. ``t_end`` is the
    horizon beyond which the cycle-duration search refuses to look.
    """

    omega_a0: float
    omega_b0: float
    T_h: float
    T_c: float
    delta: float = 0.2
    nu: float | None = None
    t_end: float = 200.0
    tol: float = 1e-10
    fixed_step: float | None = None
    common: float = 0.0

    def __post_init__(self):
        if not (self.T_h > self.T_c > 0):
            raise DomainError("need T_h > T_c > 0")
        if not (self.omega_a0 >= self.omega_b0 > 0):
            raise DomainError("need omega_a0 >= omega_b0 > 0")
        if self.delta < 0:
            raise DomainError("delta must be non-negative")
        if self.nu is None:
            object.__setattr__(self, "nu", resonance_frequency(self.omega_a0, self.omega_b0))
        if not self.nu > 0:
            raise DomainError("nu must be positive")
        if not self.t_end > 0:
            raise DomainError("t_end must be positive")
        _check_tol(self.tol)

    @property
    def q(self):
        return self.omega_a0 / self.T_h

    @property
    def p(self):
        return self.omega_b0 / self.T_c

    @property
    def init(self):
        return ThermalInit(self.q, self.p)

    @property
    def eta_carnot(self):
        return 1.0 - self.T_c / self.T_h

    def profile(self):
        if self.delta == 0 and self.common == 0:
            return FrequencyProfile.constant(self.omega_a0, self.omega_b0)
        return FrequencyProfile.sinusoidal(self.omega_a0, self.omega_b0, self.delta, self.nu,
                                           self.common)


@dataclass(frozen=True)
class EngineReport:
    """Outcome of a single cycle; energies in units of hbar g."""

    W: float
    Q: float
    eta: float
    eta_carnot: float
    t_c: float
    d_sq: float
    n_a_initial: float
    n_b_initial: float
    n_a_final: float
    n_b_final: float
    zero_heat: bool = False
    W_swap_formula: float = math.nan
    closure_offset: float = 0.0
    extra: dict = field(default_factory=dict)

    def as_row(self):
        row = asdict(self)
        row.pop("extra")
        row.update(self.extra)
        row["zero_heat"] = int(self.zero_heat)
        return row


def _report(omega_a0, omega_b0, n_a0, n_b0, n_a, n_b, *, t_c, d_sq, eta_carnot,
            conserving=True, **kw):
    """W, Q and efficiency from initial/final occupations at the initial frequencies.

    With ``conserving=True`` (n_a + n_b fixed by the dynamics) the work is
    (omega_a0 - omega_b0)(n_a0 - n_a) and the two-occupation form is kept in
    ``extra["W_two_mode"]`` as a check; otherwise the two-occupation form is
    the work.
    """
    W_two = omega_a0 * (n_a0 - n_a) + omega_b0 * (n_b0 - n_b)
    W = (omega_a0 - omega_b0) * (n_a0 - n_a) if conserving else W_two
    Q = omega_a0 * (n_a0 - n_a)
    zero_heat = abs(n_a0 - n_a) <= ZERO_HEAT * max(1.0, n_a0)
    eta = 1.0 - omega_b0 / omega_a0 if zero_heat else W / Q
    extra = kw.pop("extra", {})
    if conserving:
        extra = {**extra, "W_two_mode": W_two}
    return EngineReport(W, Q, eta, eta_carnot, t_c, d_sq, n_a0, n_b0, n_a, n_b,
                        zero_heat, extra=extra, **kw)


@lru_cache(maxsize=64)
def _modes(profile_key, t_end, tol, fixed_step):
    # mode dynamics do not depend on temperatures, so sweeps over T reuse them
    return evolve_modes(FrequencyProfile(*profile_key), t_end, tol, fixed_step=fixed_step)


def _profile_key(spec):
    prof = spec.profile()
    return (prof.omega_a0, prof.omega_b0, prof.shape, prof.delta, prof.nu, prof.common)


def resonance_frequency(omega_a0, omega_b0, g=1.0):
    """Parametric-resonance drive frequency sqrt(4 g^2 + (omega_a0 - omega_b0)^2)."""
    return math.sqrt(4 * g * g + (omega_a0 - omega_b0) ** 2)


def run_photonic_cycle(spec, t_c):
    """Run one stroke of duration ``t_c`` and report work, heat and efficiency.

    Work is taken from the occupation change of mode ``a`` and
    cross-checked against the closed form
    (omega_a0 - omega_b0)(n(q) - n(p)) |d(t_c)|^2.
    """
    if not t_c >= 0:
        raise DomainError("t_c must be non-negative")
    init = spec.init
    n_a0, n_b0 = init.n_a0, init.n_b0
    profile = spec.profile()
    if t_c == 0:
        return _report(spec.omega_a0, spec.omega_b0, n_a0, n_b0, n_a0, n_b0, t_c=0.0,
                       d_sq=0.0, eta_carnot=spec.eta_carnot, W_swap_formula=0.0)
    traj = _modes(_profile_key(spec), float(t_c), spec.tol, spec.fixed_step)
    occ = occupations_from_modes(traj, init)
    n_a, n_b = float(occ.n_a[-1]), float(occ.n_b[-1])
    d_sq = float(abs(traj.F[-1]) ** 2)
    dw = spec.omega_a0 - spec.omega_b0
    w_swap = dw * (n_a0 - n_b0) * d_sq
    wa, wb = profile(t_c)
    offset = max(abs(wa - spec.omega_a0), abs(wb - spec.omega_b0))
    report = _report(spec.omega_a0, spec.omega_b0, n_a0, n_b0, n_a, n_b, t_c=float(t_c),
                     d_sq=d_sq, eta_carnot=spec.eta_carnot, W_swap_formula=w_swap,
                     closure_offset=offset)
    allowed = 1e-8 + 10 * spec.tol * abs(dw) * (n_a0 + n_b0)
    if abs(report.W - w_swap) > allowed:
        raise NumericalFailure(
            f"work formulas disagree: {report.W!r} vs {w_swap!r} (allowed {allowed:.1e})")
    return report


def estimate_cycle_duration(spec):
    """t_c ~ pi nu / (2 delta): first zero of the slow Mathieu envelope."""
    if spec.delta <= 0:
        raise NoResonanceError("delta = 0: no parametric drive, no envelope zero")
    return math.pi * spec.nu / (2.0 * spec.delta)


def _golden_section(f, a, b, resolution):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > resolution:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimize_cycle_duration(spec):
    """Locate the cycle duration that swaps the two modes' excitations.

    Scans |C(t)|^2 over [0.5, 1.5] x the analytic estimate with a step no
    larger than pi/(8 nu), then refines the smallest sample by golden-section
    search. Returns ``(t_c, d_sq)`` with ``d_sq = 1 - |C(t_c)|^2``.
    """
    if spec.delta == 0 and spec.omega_a0 == spec.omega_b0:
        estimate = math.pi / 2  # plain resonant Rabi swap
        scan_freq = 2.0
    else:
        estimate = estimate_cycle_duration(spec)
        scan_freq = spec.nu
    lo, hi = 0.5 * estimate, 1.5 * estimate
    if lo >= spec.t_end:
        raise ResonanceMissError(
            f"search window [{lo:.4g}, {hi:.4g}] lies beyond the horizon t_end={spec.t_end}",
            window=(lo, hi))
    hi = min(hi, spec.t_end)
    traj = _modes(_profile_key(spec), float(hi), spec.tol, spec.fixed_step)

    step = math.pi / (8 * scan_freq)
    n = max(3, int(math.ceil((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, n)
    c_sq = np.abs(traj.at(grid)[:, 0]) ** 2
    i = int(np.argmin(c_sq))
    if c_sq[i] >= 0.5:
        raise ResonanceMissError(
            f"no minimum of |C|^2 below 0.5 in [{lo:.4g}, {hi:.4g}]; best {c_sq[i]:.4g} "
            f"at t={grid[i]:.6g}", window=(lo, hi), best_time=float(grid[i]),
            best_c_sq=float(c_sq[i]))

    def objective(t):
        return float(abs(traj.at(t)[0, 0]) ** 2)

    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]
    t_c = _golden_section(objective, a, b, TIME_RESOLUTION)
    return t_c, 1.0 - objective(t_c)


def envelope_first_zero(spec, t_end=None):
    """Time of the deepest carrier minimum of |C|^2 in the first envelope lobe.

    On resonance |C|^2 oscillates at the drive frequency under a slow
    envelope; the sequence of carrier minima falls to (nearly) zero at the
    envelope's first node.
    """
    estimate = estimate_cycle_duration(spec)
    t_end = 1.5 * estimate if t_end is None else t_end
    traj = evolve_modes(spec.profile(), t_end, spec.tol)
    grid = np.linspace(0.0, t_end, int(t_end / (math.pi / (16 * spec.nu))) + 2)
    c_sq = np.abs(traj.at(grid)[:, 0]) ** 2
    idx = argrelmin(c_sq)[0]
    if len(idx) < 3:
        raise ResonanceMissError("too few carrier minima to trace the envelope")
    minima = c_sq[idx]
    half = 0.5 * minima.max()
    for k in range(1, len(minima) - 1):
        if minima[k] < half and minima[k] <= minima[k - 1] and minima[k] <= minima[k + 1]:
            return float(grid[idx[k]])
    raise ResonanceMissError("envelope of carrier minima never reaches a node")


def _threads():
    try:
        return max(1, int(os.environ.get("QHE_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SweepTable:
    omega_b: np.ndarray
    W: np.ndarray
    eta: np.ndarray
    eta_carnot: float
    t_c: np.ndarray
    d_sq: np.ndarray
    threshold: float  # omega_a0 T_c / T_h, where W changes sign
    sign_changes: list  # brackets (omega_b_left, omega_b_right)
    reports: list

    def rows(self):
        return [
            {"omega_b": float(wb), "W": float(w), "eta": float(e), "eta_carnot": self.eta_carnot,
             "t_c": float(t), "d_sq": float(d)}
            for wb, w, e, t, d in zip(self.omega_b, self.W, self.eta, self.t_c, self.d_sq)
        ]


def carnot_sweep(T_h, T_c, omega_a0, omega_b_grid, *, delta=0.2, tol=1e-10, t_end=200.0,
                 fixed_step=None, threads=None):
    """Optimised cycle for each omega_b in the grid, on parametric resonance.

    Grid points run concurrently (capped by ``QHE_THREADS``); results keep
    the order of ``omega_b_grid``.
    """
    grid = np.asarray(omega_b_grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid >= omega_a0):
        raise DomainError("omega_b grid must lie inside (0, omega_a0)")

    def one(wb):
        spec = CycleSpec(omega_a0, float(wb), T_h, T_c, delta=delta, tol=tol, t_end=t_end,
                         fixed_step=fixed_step)
        t_c, _ = optimize_cycle_duration(spec)
        return run_photonic_cycle(spec, t_c)

    workers = min(threads or _threads(), len(grid)) or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, grid))
    else:
        reports = [one(wb) for wb in grid]
    W = np.array([r.W for r in reports])
    sign = np.sign(np.where(np.abs(W) < 1e-14, 0.0, W))
    changes = []
    for k in range(len(grid) - 1):
        if sign[k] * sign[k + 1] < 0 or (sign[k] == 0) != (sign[k + 1] == 0):
            changes.append((float(grid[k]), float(grid[k + 1])))
    return SweepTable(grid, W, np.array([r.eta for r in reports]), 1.0 - T_c / T_h,
                      np.array([r.t_c for r in reports]), np.array([r.d_sq for r in reports]),
                      omega_a0 * T_c / T_h, changes, reports)


def zero_power_quantity(spec, t_end, times=None):
    """q n_a(t) + p n_b(t) along a stroke; returns ``(times, values)``."""
    init = spec.init
    if t_end == 0:
        value = init.q * init.n_a0 + init.p * init.n_b0
        return np.zeros(1), np.array([value])
    traj = evolve_modes(spec.profile(), t_end, spec.tol, t_eval=times,
                        fixed_step=spec.fixed_step)
    occ = occupations_from_modes(traj, init)
    return traj.times, init.q * occ.n_a + init.p * occ.n_b


def verify_zero_power_conservation(spec, t_end, times=None):
    """max_t |q n_a + p n_b - (q n_a(0) + p n_b(0))|.

    For q = p this is conserved because n_a + n_b is; for q != p it is not,
    which serves as a negative control.
    """
    _, values = zero_power_quantity(spec, t_end, times)
    return float(np.max(np.abs(values - values[0])))


def collective_engine_work(T_hot, T_cold, omega_a0, omega_b0, t_c=None, **kw):
    """Work of a photonic cycle fed by two reservoirs (e.g. collective modes)."""
    spec = CycleSpec(omega_a0, omega_b0, T_hot, T_cold, **kw)
    if t_c is None:
        t_c, _ = optimize_cycle_duration(spec)
    return run_photonic_cycle(spec, t_c)


def swap_work(omega_a0, omega_b0, q, p, d_sq):
    """Closed-form work (omega_a0 - omega_b0)(n(q) - n(p)) d_sq."""
    return (omega_a0 - omega_b0) * (bose_occupation(q) - bose_occupation(p)) * d_sq
