"""Seeded invariant suites run by ``qhe verify``.

Each suite draws its random cases from ``numpy.random.default_rng`` seeded
with ``(seed, suite index)``, so results depend only on the seed and the
integrator settings. A suite that raises counts as failed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .counter_rotating import (evolve_cr_moments, fock_oracle_cr, random_closed_profile,
                               run_cr_cycle)
from .errors import QHEError
from .mode_dynamics import evolve_modes, rabi_closed_form, unitarity_residuals
from .observables import (ThermalInit, moment_ode_oracle, occupation_temperature,
                          occupations_from_modes)
from .photonic_engine import CycleSpec, run_photonic_cycle
from .profile import FrequencyProfile
from .three_mode import (simulate_three_mode, swap_coherence, swap_time,
                         three_mode_moment_oracle)
from .tls_engine import evolve_two_qubits, exact_two_qubits, run_tls_cycle, verify_p20


@dataclass(frozen=True)
class SuiteResult:
    """Outcome of one suite; ``checks`` holds ``(label, value, limit)`` triples."""

    name: str
    checks: tuple
    error: str = ""
    seconds: float = 0.0

    @property
    def passed(self):
        return not self.error and all(v <= lim for _, v, lim in self.checks)

    def worst(self):
        return max(self.checks, key=lambda c: c[1] / c[2] if c[2] else math.inf)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        if self.error:
            return f"[{status}] {self.name}: {self.error}"
        label, value, limit = self.worst()
        return (f"[{status}] {self.name}: {len(self.checks)} checks, worst {label} "
                f"{value:.3e} (limit {limit:.1e}) in {self.seconds:.1f} s")


def random_rwa_profile(rng):
    """A sinusoidally detuned pair with frequencies of order g."""
    omega_b0 = rng.uniform(0.5, 2.5)
    omega_a0 = omega_b0 + rng.uniform(0.0, 2.0)
    delta = rng.uniform(0.0, 0.4)
    nu = rng.uniform(0.5, 4.0)
    return FrequencyProfile.sinusoidal(omega_a0, omega_b0, delta, nu)


def _random_cycle(rng, tol, fixed_step):
    omega_a0 = rng.uniform(1.0, 4.0)
    omega_b0 = omega_a0 * rng.uniform(0.1, 0.95)
    T_c = rng.uniform(0.2, 2.0)
    T_h = T_c * rng.uniform(1.1, 5.0)
    return CycleSpec(omega_a0, omega_b0, T_h, T_c, delta=rng.uniform(0.0, 0.4), tol=tol,
                     fixed_step=fixed_step)


def suite_rabi_oracle(rng, tol, fixed_step):
    omega = rng.uniform(0.5, 2.0)
    times = np.linspace(0.0, 10 * math.pi, 501)
    traj = evolve_modes(FrequencyProfile.constant(omega), times[-1], tol, t_eval=times,
                        fixed_step=fixed_step)
    exact = rabi_closed_form(omega, times).as_array()
    return [("amplitude_error", float(np.max(np.abs(traj.coeffs - exact))), 1e-8)]


def suite_unitarity(rng, tol, fixed_step, n=10):
    worst = 0.0
    for _ in range(n):
        traj = evolve_modes(random_rwa_profile(rng), 30.0, tol, fixed_step=fixed_step)
        worst = max(worst, float(unitarity_residuals(traj).max()))
    return [("max_residual", worst, 1e-8)]


def suite_thermal_swap(rng, tol, fixed_step):
    omega = rng.uniform(0.5, 2.0)
    T_a, T_b = rng.uniform(0.5, 3.0, size=2)
    init = ThermalInit.from_temperatures(omega, T_a, omega, T_b)
    traj = evolve_modes(FrequencyProfile.constant(omega), math.pi / 2, tol,
                        t_eval=[0.0, math.pi / 2], fixed_step=fixed_step)
    occ = occupations_from_modes(traj, init)
    Ta = occupation_temperature(occ.n_a[-1], omega)
    Tb = occupation_temperature(occ.n_b[-1], omega)
    return [("T_a_vs_T_b0", abs(Ta - T_b), 1e-8), ("T_b_vs_T_a0", abs(Tb - T_a), 1e-8)]


def suite_moment_oracle(rng, tol, fixed_step, n=5):
    worst = 0.0
    times = np.linspace(0.0, 20.0, 201)
    for _ in range(n):
        prof = random_rwa_profile(rng)
        init = ThermalInit(rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0))
        traj = evolve_modes(prof, times[-1], tol, t_eval=times, fixed_step=fixed_step)
        occ = occupations_from_modes(traj, init)
        ref = moment_ode_oracle(prof, init, times[-1], times)
        worst = max(worst, float(np.max(np.abs(occ.n_a - ref.n_a))),
                    float(np.max(np.abs(occ.n_b - ref.n_b))))
    return [("occupation_error", worst, 1e-7)]


def suite_three_mode(rng, tol, fixed_step):
    q, p = rng.uniform(0.2, 3.0, size=2)
    ts = swap_time()
    traj = simulate_three_mode(q, p, ts, tol, t_eval=[0.0, ts], fixed_step=fixed_step)
    n_a, n_b, n_c, coh = three_mode_moment_oracle(q, p, [ts])
    formula = swap_coherence(q, p)
    return [("coherence_vs_formula", abs(traj.coherence[-1] - formula), 1e-6),
            ("oracle_coherence_vs_formula", abs(coh[0] - formula), 1e-6),
            ("n_a_vs_oracle", abs(traj.n_a[-1] - n_a[0]), 1e-6),
            ("antisymmetric_drift", float(np.max(np.abs(traj.n_B2 - traj.n_B2[0]))), 1e-9)]


def suite_efficiency(rng, tol, fixed_step, n=10):
    eta_err, carnot = 0.0, -math.inf
    for _ in range(n):
        spec = _random_cycle(rng, tol, fixed_step)
        report = run_photonic_cycle(spec, rng.uniform(0.5, 30.0))
        if not report.zero_heat:
            eta_err = max(eta_err, abs(report.eta - (1 - spec.omega_b0 / spec.omega_a0)))
        if report.W > 0:
            carnot = max(carnot, report.eta - report.eta_carnot)
    return [("eta_error", eta_err, 1e-10), ("carnot_margin", carnot, 1e-12)]


def suite_tls(rng, tol, fixed_step):
    spec = _random_cycle(rng, tol, fixed_step)
    times = np.linspace(0.0, 10.0, 4001)
    traj = evolve_two_qubits(spec.profile(), spec.T_h, spec.T_c, 10.0, tol, t_eval=times,
                             fixed_step=fixed_step)
    p20 = verify_p20(traj).max_residual
    run_tls_cycle(spec, rng.uniform(0.5, 20.0))  # raises if the bracket is violated
    wa, wb = rng.uniform(0.5, 3.0, size=2)
    const = evolve_two_qubits(FrequencyProfile.constant(wa, wb), spec.T_h, spec.T_c, 10.0, tol,
                              t_eval=times[::40], fixed_step=fixed_step)
    exact = exact_two_qubits(wa, wb, spec.T_h, spec.T_c, times[::40])
    return [("p20_residual", p20, 1e-5),
            ("exact_diagonalisation", float(np.max(np.abs(const.rho - exact))), 1e-8)]


def suite_counter_rotating(rng, tol, fixed_step, n=10):
    work, drift, floor = -math.inf, 0.0, 0.0
    for _ in range(n):
        prof, t_c = random_closed_profile(rng)
        n_a0, n_b0 = rng.uniform(0.0, 2.0, size=2)
        report = run_cr_cycle(prof, t_c, n_a0, n_b0, tol, fixed_step=fixed_step)
        traj = evolve_cr_moments(prof, n_a0, n_b0, t_c, tol, fixed_step=fixed_step)
        work = max(work, report.W)
        drift = max(drift, traj.difference_drift())
        floor = max(floor, traj.floor_violation())
    wa, wb = rng.uniform(0.0, 1.0, size=2)
    times = np.linspace(0.0, 2.0, 41)
    moments = evolve_cr_moments(FrequencyProfile.constant(wa + 1e-3, wb + 1e-3), 0.0, 0.0, 2.0,
                                tol, t_eval=times, fixed_step=fixed_step)
    fock, _ = fock_oracle_cr(wa + 1e-3, wb + 1e-3, times)
    return [("max_work", work, 1e-9), ("difference_drift", drift, 1e-9),
            ("floor_violation", floor, 1e-9),
            ("fock_oracle", float(np.max(np.abs(moments.n_a - fock))), 1e-7)]


SUITES = [
    ("rabi-oracle", suite_rabi_oracle),
    ("unitarity", suite_unitarity),
    ("thermal-swap", suite_thermal_swap),
    ("moment-oracle", suite_moment_oracle),
    ("three-mode", suite_three_mode),
    ("efficiency-law", suite_efficiency),
    ("tls", suite_tls),
    ("counter-rotating", suite_counter_rotating),
]


def verify_all(seed=0, tol=1e-10, fixed_step=None):
    """Run every suite; returns a list of :class:`SuiteResult`."""
    results = []
    for index, (name, suite) in enumerate(SUITES):
        rng = np.random.default_rng([seed, index])
        start = time.perf_counter()
        try:
            checks = tuple((label, float(v), lim) for label, v, lim in suite(rng, tol, fixed_step))
            error = ""
        except (QHEError, ValueError) as exc:
            checks, error = (), f"{type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, checks, error, time.perf_counter() - start))
    return results
