"""Explicit Runge-Kutta integrators for small complex-valued ODE systems.

Two modes are provided:

* :func:`dopri5` -- Dormand-Prince 5(4) embedded pair with a PI step-size
  controller and the standard 4th-order continuous extension, so solutions
  can be evaluated anywhere on the interval.
* :func:`rk4` -- classical 4th-order Runge-Kutta on a user-set uniform step,
  bit-reproducible for golden-file tests.

Both return a :class:`Solution`, which is callable at arbitrary times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ProfileError, StiffnessError

# Butcher tableau (Hairer, Norsett & Wanner, vol. I, p. 178)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = _A[6]
# 5th-order minus embedded 4th-order weights, over all seven stages
_E = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
])
# continuous-extension weights
_D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
    -10690763975 / 1880347072, 701980252875 / 199316789632,
    -1453857185 / 822651844, 69997945 / 29380423,
])

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_BETA = 0.04  # PI-controller memory exponent
_EXPO = 0.2 - 0.75 * _BETA


@dataclass(frozen=True)
class Solution:
    """Accepted steps of an integration plus per-step interpolation data.

    ``y[i]`` is the state at ``t[i]``. ``dense[i]`` holds the coefficients of
    the interpolant on ``[t[i], t[i+1]]``; its meaning depends on ``kind``.
    """

    t: np.ndarray
    y: np.ndarray
    dense: np.ndarray
    kind: str  # "dopri5" or "hermite"
    n_rhs: int = 0
    n_rejected: int = 0

    def __call__(self, times) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        scalar = times.ndim == 0
        times = np.atleast_1d(times)
        lo, hi = self.t[0], self.t[-1]
        slack = 1e-12 * max(1.0, abs(hi))
        if np.any(times < lo - slack) or np.any(times > hi + slack):
            raise ValueError(f"requested times outside [{lo}, {hi}]")
        if len(self.t) == 1:
            out = np.repeat(self.y[:1], len(times), axis=0)
            return out[0] if scalar else out
        idx = np.clip(np.searchsorted(self.t, times, side="right") - 1, 0, len(self.t) - 2)
        h = self.t[idx + 1] - self.t[idx]
        theta = ((times - self.t[idx]) / h)[:, None]
        coef = self.dense[idx]
        if self.kind == "dopri5":
            r1, r2, r3, r4, r5 = (coef[:, j] for j in range(5))
            th1 = 1.0 - theta
            out = r1 + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)))
        else:
            # cubic Hermite on (y0, y1, h*f0, h*f1)
            y0, y1, f0, f1 = (coef[:, j] for j in range(4))
            th2 = theta * theta
            th3 = th2 * theta
            out = ((2 * th3 - 3 * th2 + 1) * y0 + (th3 - 2 * th2 + theta) * f0
                   + (-2 * th3 + 3 * th2) * y1 + (th3 - th2) * f1)
        # pin exact nodes so that sampling at a step time reproduces y bitwise
        exact = times == self.t[idx]
        if np.any(exact):
            out[exact] = self.y[idx[exact]]
        at_end = times == self.t[-1]
        if np.any(at_end):
            out[at_end] = self.y[-1]
        return out[0] if scalar else out


def _check_finite(k, t):
    if not np.all(np.isfinite(k)):
        raise ProfileError(f"right-hand side is not finite at t={t!r}")


def _error_norm(err, y0, y1, tol):
    e = err / (tol * (1.0 + np.maximum(np.abs(y0), np.abs(y1))))
    return math.sqrt(np.vdot(e, e).real / e.size)


def dopri5(fun, t_end, y0, tol, *, t0=0.0, h0=None, h_max=None, max_steps=5_000_000):
    """Integrate ``y' = fun(t, y)`` from ``t0`` to ``t_end``.

    ``tol`` is used as both the relative and absolute tolerance of the local
    error estimate. Raises :class:`StiffnessError` if the step size underflows.
    """
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    t = float(t0)
    t_end = float(t_end)
    if t_end < t:
        raise ValueError("t_end must not precede t0")
    span = t_end - t
    if h_max is None:
        h_max = span if span > 0 else 1.0
    ts, ys, dense = [t], [y.copy()], []
    if span == 0.0:
        return Solution(np.array(ts), np.array(ys), np.empty((0, 5) + y.shape, y.dtype),
                        "dopri5")

    k = np.empty((7,) + y.shape, dtype=y.dtype)
    k[0] = fun(t, y)
    _check_finite(k[0], t)
    n_rhs = 1
    if h0 is None:
        # crude initial guess from the derivative scale
        d0 = np.sqrt(np.mean(np.abs(y) ** 2)) + tol
        d1 = np.sqrt(np.mean(np.abs(k[0]) ** 2)) + tol
        h0 = 0.01 * d0 / d1 if d1 > 1e-12 else 1e-3
    h = min(float(h0), h_max, span)
    fac_old = 1e-4
    n_rejected = 0
    last_rejected = False

    for _ in range(max_steps):
        if t + 1.01 * h >= t_end:
            h = t_end - t
        for s in range(1, 7):
            y_stage = y + np.dot(h * _A[s], k[:s])
            k[s] = fun(t + _C[s] * h, y_stage)
        n_rhs += 6
        y_new = y_stage  # stage 7 argument is the 5th-order solution (FSAL)
        err = _error_norm(np.dot(h * _E, k), y, y_new, tol)
        if not np.isfinite(err):
            raise ProfileError(f"right-hand side is not finite near t={t!r}")

        fac11 = err ** _EXPO if err > 0 else 0.0
        if err <= 1.0:
            fac = fac11 / fac_old ** _BETA
            fac = min(1 / _FAC_MIN, max(1 / _FAC_MAX, fac / _SAFETY))
            h_new = h / fac
            if last_rejected:
                h_new = min(h_new, h)
            fac_old = max(err, 1e-4)

            coef = np.empty((5,) + y.shape, dtype=y.dtype)
            coef[0] = y
            coef[1] = dy = y_new - y
            coef[2] = bspl = h * k[0] - dy
            coef[3] = dy - h * k[6] - bspl
            coef[4] = np.dot(h * _D, k)
            dense.append(coef)
            t = t + h if t + h < t_end else t_end
            y = y_new
            k[0] = k[6]
            ts.append(t)
            ys.append(y)
            last_rejected = False
            if t >= t_end:
                break
            h = min(h_new, h_max)
        else:
            h = h / min(1 / _FAC_MIN, fac11 / _SAFETY)
            n_rejected += 1
            last_rejected = True
        if h < 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise StiffnessError(f"step size underflow at t={t!r} (h={h:.3e})")
    else:
        raise StiffnessError(f"exceeded {max_steps} steps before t_end={t_end}")

    return Solution(np.array(ts), np.array(ys), np.array(dense), "dopri5",
                    n_rhs=n_rhs, n_rejected=n_rejected)


def rk4(fun, t_end, y0, step, *, t0=0.0):
    """Classical RK4 on a uniform grid of spacing ``step`` (last step shortened).

    Grid points are computed as ``t0 + i*step`` rather than by accumulation, so
    identical inputs give bit-identical output.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    t0 = float(t0)
    t_end = float(t_end)
    n = int(np.ceil((t_end - t0) / step - 1e-9))
    grid = t0 + step * np.arange(n + 1)
    grid[-1] = t_end
    ys = [y.copy()]
    fs = []
    f = fun(grid[0], y)
    _check_finite(f, grid[0])
    dense = []
    for i in range(n):
        t, h = grid[i], grid[i + 1] - grid[i]
        k1 = f
        k2 = fun(t + h / 2, y + h / 2 * k1)
        k3 = fun(t + h / 2, y + h / 2 * k2)
        k4 = fun(t + h, y + h * k3)
        y_new = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        f_new = fun(grid[i + 1], y_new)
        _check_finite(f_new, grid[i + 1])
        dense.append(np.stack([y, y_new, h * f, h * f_new]))
        fs.append(f)
        y, f = y_new, f_new
        ys.append(y.copy())
    dense = np.array(dense) if dense else np.empty((0, 4) + y.shape, y.dtype)
    return Solution(grid if n else grid[:1], np.array(ys), dense, "hermite", n_rhs=4 * n + 1)


def integrate(fun, t_end, y0, *, tol=1e-10, fixed_step=None, t0=0.0):
    """Dispatch to :func:`rk4` when ``fixed_step`` is given, else :func:`dopri5`."""
    if fixed_step is not None:
        return rk4(fun, t_end, y0, fixed_step, t0=t0)
    return dopri5(fun, t_end, y0, tol, t0=t0)
