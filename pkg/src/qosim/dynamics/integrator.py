"""Adaptive Dormand-Prince 5(4) integrator with continuous output.

Shared by every time evolution in the package. The solver works on flat
complex vectors; callers reshape inside their right-hand sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import IntegrationError

# Butcher tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
# 5th order weights minus embedded 4th order weights
_E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension, y(t0 + th*h) = y0 + h * K^T @ P @ [th, th^2, th^3, th^4]
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_BETA = 0.04  # PI controller memory
_EXPO = 0.2 - 0.75 * _BETA
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and step limits for :class:`DormandPrince`.

    ``initial_step=None`` selects the first step automatically.
    """

    rel_tol: float = 1e-6
    abs_tol: float = 1e-8
    max_step: float = math.inf
    initial_step: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValueError("initial_step must be positive")


def _rms(x: np.ndarray) -> float:
    return math.sqrt(float(np.vdot(x, x).real) / x.size) if x.size else 0.0


class DormandPrince:
    """Step-by-step DOPRI5 solver for ``dy/dt = rhs(t, y)``.

    After each call to :meth:`step` the interval ``[t_old, t]`` is covered by
    :meth:`dense`. The solver never steps past ``t_end``.
    """

    def __init__(self, rhs: Callable[[float, np.ndarray], np.ndarray], t0: float, y0,
                 t_end: float, config: IntegratorConfig | None = None):
        self.rhs = rhs
        self.config = config or IntegratorConfig()
        self.t0 = float(t0)
        self.t_end = float(t_end)
        self.min_step = 1e-14 * abs(self.t_end - self.t0)
        self.t = self.t0
        self.y = np.array(y0, dtype=complex)
        self.f = np.asarray(rhs(self.t, self.y), dtype=complex)
        self.n_rhs = 1
        self.n_accepted = 0
        self.n_rejected = 0
        self._K = np.empty((7, self.y.size), dtype=complex)
        self._err_old = 1e-4
        self._Q = None
        self.t_old = self.t
        self.y_old = self.y
        if self.config.initial_step is not None:
            self.h = min(self.config.initial_step, self.config.max_step)
        else:
            self.h = self._initial_step()

    def _scale(self, y):
        return self.config.abs_tol + self.config.rel_tol * np.abs(y)

    def _initial_step(self) -> float:
        cfg = self.config
        sc = self._scale(self.y)
        d0 = _rms(self.y / sc)
        d1 = _rms(self.f / sc)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, abs(self.t_end - self.t0) or 1.0, cfg.max_step)
        # overflow in the scaled norms (absurdly small tolerances) must not give a zero step
        h0 = max(h0, self.min_step, 1e-300)
        f1 = self.rhs(self.t + h0, self.y + h0 * self.f)
        self.n_rhs += 1
        d2 = _rms((f1 - self.f) / sc) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        return max(min(100 * h0, h1, cfg.max_step), self.min_step, 1e-300)

    def restart(self, t: float, y) -> None:
        """Continue from a new state (e.g. after a quantum jump), keeping the step size."""
        self.t = float(t)
        self.y = np.array(y, dtype=complex)
        self.f = np.asarray(self.rhs(self.t, self.y), dtype=complex)
        self.n_rhs += 1
        self.t_old, self.y_old = self.t, self.y
        self._Q = None
        self._err_old = 1e-4

    def step(self) -> None:
        """Advance by one accepted step."""
        cfg = self.config
        t, y, f, K = self.t, self.y, self.f, self._K
        rejected = False
        while True:
            h = min(self.h, cfg.max_step)
            last = False
            if t + h >= self.t_end or self.t_end - (t + h) < self.min_step:
                h = self.t_end - t
                last = True
            if h < self.min_step:
                raise IntegrationError("step size underflow", t)
            K[0] = f
            for s in range(1, 6):
                K[s] = self.rhs(t + _C[s] * h, y + h * (_A[s - 1] @ K[:s]))
            y_new = y + h * (_A[5] @ K[:6])
            K[6] = self.rhs(t + h, y_new)
            self.n_rhs += 6
            err_vec = h * (_E @ K)
            sc = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = _rms(err_vec / sc)
            if not math.isfinite(err):
                self.h = h * _MIN_FACTOR
                self.n_rejected += 1
                rejected = True
                continue
            fac11 = err ** _EXPO if err > 0 else 0.0
            if err <= 1.0:
                fac = fac11 / self._err_old ** _BETA / _SAFETY
                fac = min(1 / _MIN_FACTOR, max(1 / _MAX_FACTOR, fac))
                h_new = h / fac
                if rejected:
                    h_new = min(h_new, h)
                self._err_old = max(err, 1e-4)
                self.t_old, self.y_old = t, y
                self.t = self.t_end if last else t + h
                self.y = y_new
                self.f = K[6].copy()
                self._h_used = h
                self.h = h_new
                self._Q = None
                self.n_accepted += 1
                return
            self.h = h / min(1 / _MIN_FACTOR, fac11 / _SAFETY)
            self.n_rejected += 1
            rejected = True

    def dense(self, t: float) -> np.ndarray:
        """Interpolated solution at ``t`` within the last accepted step."""
        if t == self.t:
            return self.y.copy()
        if t == self.t_old:
            return self.y_old.copy()
        if self._Q is None:
            self._Q = self._K.T @ _P
        h = self.t - self.t_old
        th = (t - self.t_old) / h
        return self.y_old + h * (self._Q @ np.array([th, th * th, th ** 3, th ** 4]))


def integrate_adaptive(rhs, y0, times, config: IntegratorConfig | None = None, sample=None) -> list:
    """Integrate ``dy/dt = rhs(t, y)`` and sample the solution at ``times``.

    Args:
        rhs: Derivative function on flat complex vectors.
        y0: Initial value at ``times[0]``.
        times: Strictly increasing output times.
        config: Tolerances and step limits.
        sample: Optional ``sample(t, y)`` applied to each output; its return
            values are collected instead of copies of ``y``.

    Returns:
        List with one entry per output time.

    Raises:
        IntegrationError: If the step size underflows.
    """
    times = check_times(times)
    if sample is None:
        def sample(t, y):
            return y.copy()
    y0 = np.array(y0, dtype=complex).ravel()
    out = [sample(times[0], y0)]
    if len(times) == 1:
        return out
    solver = DormandPrince(rhs, times[0], y0, times[-1], config)
    k = 1
    while k < len(times):
        solver.step()
        while k < len(times) and times[k] <= solver.t:
            out.append(sample(times[k], solver.dense(times[k])))
            k += 1
    return out


def check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float).ravel()
    if times.size == 0:
        raise ValueError("need at least one output time")
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("output times must be strictly increasing")
    return times
