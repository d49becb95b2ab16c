"""Lotka-Volterra vector field and fixed-step RK4 trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import InsufficientDataError, IntegrationError, InvalidStateError


class State(NamedTuple):
    x: float  # prey
    y: float  # predator


@dataclass(frozen=True)
class SystemParams:
    alpha: float = 0.6
    beta: float = 0.025
    gamma: float = 0.8
    delta: float = 0.02

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")

    @property
    def x_eq(self) -> float:
        return _decimal_ratio(self.gamma, self.delta)

    @property
    def y_eq(self) -> float:
        return _decimal_ratio(self.alpha, self.beta)


def _decimal_ratio(a: float, b: float) -> float:
    # quotient of the rates as written (shortest repr), rounded once:
    # 0.6 / 0.025 gives 24.0 here, 23.999999999999996 in plain float division
    return float(Fraction(repr(a)) / Fraction(repr(b)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled states; sample ``k`` sits at ``t0 + k*dt``."""

    t0: float
    dt: float
    states: np.ndarray  # (n, 2), columns x, y

    def __post_init__(self):
        states = np.array(self.states, dtype=np.float64)
        if states.ndim != 2 or states.shape[1] != 2 or len(states) == 0:
            raise ValueError("states must be a non-empty (n, 2) array")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.states))

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]

    def state(self, k: int) -> State:
        return State(float(self.states[k, 0]), float(self.states[k, 1]))


def lv_derivative(s: State, p: SystemParams) -> tuple[float, float]:
    x, y = s
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InvalidStateError(f"non-finite state {s!r}")
    return p.alpha * x - p.beta * x * y, p.delta * x * y - p.gamma * y


def lv_field(states: np.ndarray, p: SystemParams) -> np.ndarray:
    """Vectorised ``lv_derivative`` over an (n, 2) array."""
    x = states[:, 0]
    y = states[:, 1]
    return np.stack([p.alpha * x - p.beta * x * y, p.delta * x * y - p.gamma * y], axis=1)


def equilibrium(p: SystemParams) -> State:
    return State(p.x_eq, p.y_eq)


def rk4_step(s: State, p: SystemParams, dt: float, step_index: int = 1) -> State:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if not (s.x > 0 and s.y > 0):
        raise InvalidStateError(f"state must be positive, got {s!r}")
    # same operation order as the kernels, so a single step agrees bit for bit
    h2 = 0.5 * dt
    x, y = s
    k1x, k1y = lv_derivative(State(x, y), p)
    k2x, k2y = lv_derivative(State(x + h2 * k1x, y + h2 * k1y), p)
    k3x, k3y = lv_derivative(State(x + h2 * k2x, y + h2 * k2y), p)
    k4x, k4y = lv_derivative(State(x + dt * k3x, y + dt * k3y), p)
    h6 = dt / 6.0
    nx = x + h6 * (((k1x + 2.0 * k2x) + 2.0 * k3x) + k4x)
    ny = y + h6 * (((k1y + 2.0 * k2y) + 2.0 * k3y) + k4y)
    if not (nx > 0 and ny > 0 and math.isfinite(nx) and math.isfinite(ny)):
        raise IntegrationError("RK4 step left the positive quadrant", step_index)
    return State(nx, ny)


def simulate(p: SystemParams, s0: State, dt: float, n_steps: int, t0: float = 0.0) -> Trajectory:
    """Integrate ``n_steps`` RK4 steps from ``s0``; returns ``n_steps + 1`` samples."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    x0, y0 = float(s0[0]), float(s0[1])
    if not (x0 > 0 and y0 > 0 and math.isfinite(x0) and math.isfinite(y0)):
        raise InvalidStateError(f"initial state must be positive and finite, got {s0!r}")
    states, fail = kernels.integrate_lv(
        p.alpha, p.beta, p.gamma, p.delta, x0, y0, float(dt), int(n_steps)
    )
    if fail >= 0:
        raise IntegrationError("trajectory left the positive quadrant", fail)
    return Trajectory(t0, float(dt), states)


def upward_crossings(values: np.ndarray, level: float, dt: float = 1.0) -> np.ndarray:
    """Linearly interpolated times (in units of ``dt``) where ``values`` rises through ``level``."""
    v = np.asarray(values, dtype=np.float64) - level
    k = np.nonzero((v[:-1] < 0) & (v[1:] >= 0))[0]
    frac = -v[k] / (v[k + 1] - v[k])
    return (k + frac) * dt


def period_estimate(traj: Trajectory, level: float | None = None) -> float:
    """Mean spacing of successive upward crossings of prey through ``level``.

    For an LV trajectory pass ``level=p.x_eq``. Without it the sample mean of
    the prey series is used, which is close to the equilibrium on whole cycles.
    """
    if level is None:
        level = float(np.mean(traj.x))
    crossings = upward_crossings(traj.x, level, traj.dt)
    if len(crossings) < 2:
        raise InsufficientDataError(
            f"need at least 2 upward crossings to estimate a period, found {len(crossings)}"
        )
    return float(np.mean(np.diff(crossings)))
