"""Adaptive embedded Dormand-Prince 4(5) stepper on complex state vectors.

Hand-rolled rather than delegated to scipy.solve_ivp because the quantum-jump
engine has to interleave norm monitoring and bisection with step control, and
the master/trajectory paths must share one tableau for cross-validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# b5 - b4: weights of the embedded error estimate
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_ORDER_EXPONENT = 0.2  # 1/5


class IntegrationError(RuntimeError):
    """Step-size underflow or another unrecoverable integration failure."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, sampling grid and trajectory options for the solvers.

    method 'auto' picks the exact segment propagator ('eig') for trajectory
    runs below the dense-size threshold and falls back to 'rk45' otherwise;
    the master equation always integrates with the adaptive Runge-Kutta.
    eig_segments overrides the number of frozen-drive segments used by the
    'eig' method under a ramped drive (default: one per sample interval).
    """

    sample_times: tuple[float, ...]
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: Optional[float] = None
    rng_seed: int = 0
    method: str = "auto"
    eig_segments: Optional[int] = None

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.sample_times)
        object.__setattr__(self, "sample_times", ts)
        if not ts or ts[0] != 0.0:
            raise ValueError("sample_times must start at 0")
        if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
            raise ValueError("sample_times must be strictly increasing")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be > 0")
        if self.max_step is not None and not self.max_step > 0:
            raise ValueError("max_step must be > 0")
        if self.method not in ("auto", "rk45", "eig"):
            raise ValueError(f"method must be auto|rk45|eig, got {self.method!r}")

    @classmethod
    def for_span(cls, duration: float, samples: int, **kwargs) -> "IntegratorConfig":
        if samples < 2:
            raise ValueError("samples must be >= 2")
        ts = tuple(np.linspace(0.0, duration, samples))
        return cls(sample_times=ts, **kwargs)


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray,
                rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))


class Dopri5:
    """One adaptive DP(4,5) integration, advanced step by accepted step.

    ``f(t, y)`` must return dy/dt for a complex state vector y.  The first
    same-as-last stage is reused across accepted steps.
    """

    def __init__(self, f: Callable[[float, np.ndarray], np.ndarray],
                 t0: float, y0: np.ndarray,
                 rel_tol: float, abs_tol: float, max_step: float,
                 span: Optional[float] = None):
        self.f = f
        self.t = float(t0)
        self.y = np.array(y0, dtype=np.complex128)
        self.rtol = rel_tol
        self.atol = abs_tol
        self.max_step = float(max_step)
        # steps below 1e-14 of the integration span signal a stiffness collapse
        self.min_step = 1e-14 * span if span else 0.0
        self.k1 = f(self.t, self.y)
        self.h = self._initial_step()
        self.n_accepted = 0
        self.n_rejected = 0

    def _initial_step(self) -> float:
        scale = self.atol + self.rtol * max(float(np.abs(self.y).max()), 1e-300)
        rate = float(np.abs(self.k1).max())
        if rate == 0.0:
            return self.max_step
        return min(self.max_step, 0.01 * scale / rate)

    def _stages(self, h: float):
        t, y = self.t, self.y
        k = [self.k1]
        for i in range(1, 7):
            yi = y + h * sum(a * ki for a, ki in zip(_A[i], k) if a != 0.0)
            if i < 6:
                k.append(self.f(t + _C[i] * h, yi))
            else:
                # stage 7 is evaluated at the 5th-order solution (FSAL)
                y5 = yi
                k.append(self.f(t + h, y5))
        err = h * sum(e * ki for e, ki in zip(_E, k) if e != 0.0)
        return y5, k[6], err

    def trial_step(self, h: float):
        """Unadapted 5th-order step of exactly h from the current state."""
        y5, _, _ = self._stages(h)
        return y5

    def step(self, t_limit: float) -> None:
        """Advance by one accepted step, never beyond t_limit."""
        if self.t >= t_limit:
            raise ValueError("step past t_limit requested")
        while True:
            h = min(self.h, self.max_step, t_limit - self.t)
            floor = max(16.0 * np.spacing(abs(self.t)), 1e-300)
            if h < floor or (self.h < self.min_step and h < self.min_step):
                raise IntegrationError(
                    f"step-size underflow at t={self.t:.6e} (h={h:.3e})")
            y5, k7, err = self._stages(h)
            enorm = _error_norm(err, self.y, y5, self.rtol, self.atol)
            if enorm <= 1.0:
                factor = _MAX_FACTOR if enorm == 0.0 else min(
                    _MAX_FACTOR, _SAFETY * enorm ** -_ORDER_EXPONENT)
                self.t += h
                self.y = y5
                self.k1 = k7
                proposal = h * factor
                # a step clipped by t_limit must not shrink the stored proposal
                self.h = max(proposal, self.h) if h < self.h else proposal
                self.n_accepted += 1
                return
            self.h = h * max(_MIN_FACTOR, _SAFETY * enorm ** -_ORDER_EXPONENT)
            self.n_rejected += 1

    def advance_to(self, t_target: float) -> np.ndarray:
        """Step until t_target (snapping the final few-ulp sliver)."""
        while True:
            gap = t_target - self.t
            if gap <= 32.0 * np.spacing(abs(t_target)):
                self.t = t_target
                return self.y
            self.step(t_target)
