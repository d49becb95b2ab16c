"""The separable LV Lyapunov function, its gradient and its normal derivative along orbits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import State, SystemParams, Trajectory, lv_field, period_estimate
from .errors import DegeneratePointError, DomainError, InsufficientDataError


def lyapunov_value(s: State, p: SystemParams) -> float:
    x, y = s
    if not (x > 0 and y > 0):
        raise DomainError(f"V is defined for positive states only, got {s!r}")
    return p.delta * (x - p.x_eq * math.log(x)) + p.beta * (y - p.y_eq * math.log(y))


def lyapunov_gradient(s: State, p: SystemParams) -> tuple[float, float]:
    x, y = s
    if not (x > 0 and y > 0):
        raise DomainError(f"grad V is defined for positive states only, got {s!r}")
    return p.delta * (1.0 - p.x_eq / x), p.beta * (1.0 - p.y_eq / y)


def lyapunov_values(states: np.ndarray, p: SystemParams) -> np.ndarray:
    x, y = _positive_columns(states)
    return p.delta * (x - p.x_eq * np.log(x)) + p.beta * (y - p.y_eq * np.log(y))


def lyapunov_gradients(states: np.ndarray, p: SystemParams) -> np.ndarray:
    x, y = _positive_columns(states)
    return np.stack([p.delta * (1.0 - p.x_eq / x), p.beta * (1.0 - p.y_eq / y)], axis=1)


def _positive_columns(states):
    states = np.asarray(states, dtype=np.float64)
    if np.any(states <= 0):
        raise DomainError("V is defined for positive states only")
    return states[:, 0], states[:, 1]


def outward_normals(states: np.ndarray, p: SystemParams) -> np.ndarray:
    """Unit normals ``(t_y, -t_x)`` to the flow; outward for the counterclockwise LV orbit."""
    states = np.asarray(states, dtype=np.float64)
    f = lv_field(states, p)
    speed = np.hypot(f[:, 0], f[:, 1])
    x, y = states[:, 0], states[:, 1]
    # the two terms of each component cancel to rounding error at the equilibrium
    scale = p.alpha * x + p.beta * x * y + p.delta * x * y + p.gamma * y
    bad = np.nonzero(speed <= 1e-12 * scale)[0]
    if len(bad):
        raise DegeneratePointError("velocity vanishes, normal undefined", int(bad[0]))
    t = f / speed[:, None]
    return np.stack([t[:, 1], -t[:, 0]], axis=1)


@dataclass(frozen=True, eq=False)
class LyapunovProfile:
    t0: float
    dt: float
    value: np.ndarray
    gradient: np.ndarray
    unit_normal: np.ndarray
    normal_derivative: np.ndarray
    argmin: int
    argmax: int

    def __len__(self) -> int:
        return len(self.value)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.value))


def normal_derivative_profile(
    traj: Trajectory, p: SystemParams, period_samples: int | None = None
) -> LyapunovProfile:
    """Per-sample V, grad V, outward normal and dV/dn along ``traj``.

    Extrema of dV/dn are located within the first ``period_samples`` samples.
    If not given, the period is estimated from the trajectory; a trajectory
    shorter than two cycles uses all of its samples.
    """
    states = traj.states
    value = lyapunov_values(states, p)
    grad = lyapunov_gradients(states, p)
    normal = outward_normals(states, p)
    dvdn = np.einsum("nd,nd->n", grad, normal)
    if period_samples is None:
        try:
            period_samples = int(round(period_estimate(traj, p.x_eq) / traj.dt))
        except InsufficientDataError:
            period_samples = len(dvdn)
    period_samples = max(1, min(period_samples, len(dvdn)))
    imin, imax = profile_extrema(dvdn, period_samples)
    return LyapunovProfile(traj.t0, traj.dt, value, grad, normal, dvdn, imin, imax)


def profile_extrema(profile, period_samples: int) -> tuple[int, int]:
    """(argmin, argmax) over the first ``period_samples`` entries; ties go to the smallest index."""
    profile = np.asarray(profile, dtype=np.float64)
    if len(profile) == 0:
        raise InsufficientDataError("empty profile")
    if not 1 <= period_samples <= len(profile):
        raise ValueError("period_samples must lie in [1, len(profile)]")
    window = profile[:period_samples]
    # np.argmin/argmax return the first occurrence
    return int(np.argmin(window)), int(np.argmax(window))


def surface_grid(
    p: SystemParams,
    x_range: tuple[float, float] = (5.0, 100.0),
    y_range: tuple[float, float] = (2.0, 60.0),
    nx: int = 200,
    ny: int = 200,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """V on a regular grid; returns (x, y, V) as flat arrays in row-major (y outer, x inner) order."""
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 points per axis")
    gx = np.linspace(x_range[0], x_range[1], nx)
    gy = np.linspace(y_range[0], y_range[1], ny)
    X, Y = np.meshgrid(gx, gy)
    V = lyapunov_values(np.stack([X.ravel(), Y.ravel()], axis=1), p)
    return X.ravel(), Y.ravel(), V
