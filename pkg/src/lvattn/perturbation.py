"""Kick a trajectory sample off its orbit and measure how far the flow carries it."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import State, SystemParams, Trajectory, simulate
from .errors import InvalidPerturbationError
from .lyapunov import lyapunov_value, lyapunov_values, outward_normals

DEFAULT_RETURN_THRESHOLD = 0.5


@dataclass(frozen=True)
class PerturbationSpec:
    index: int
    magnitude: float = 3.0
    horizon: int = 1
    direction: tuple[float, float] | None = None  # None: local outward normal

    def __post_init__(self):
        if not self.magnitude >= 0:
            raise InvalidPerturbationError("magnitude must be >= 0")
        if self.horizon < 1:
            raise InvalidPerturbationError("horizon must be >= 1")
        if self.direction is not None:
            norm = math.hypot(*self.direction)
            if abs(norm - 1.0) > 1e-9:
                raise InvalidPerturbationError(f"direction must be a unit vector, |d| = {norm!r}")


@dataclass(frozen=True, eq=False)
class PerturbationResult:
    index: int
    t: float
    direction: tuple[float, float]
    magnitude: float
    delta_V: float
    max_deviation: float
    mean_deviation: float
    return_time: float | None
    reference: Trajectory
    perturbed: Trajectory
    distance: np.ndarray
    v_drift: float  # max relative drift of V along the perturbed orbit

    def summary(self) -> dict:
        return {
            "index": self.index,
            "t": self.t,
            "state": list(map(float, self.reference.states[0])),
            "direction": list(self.direction),
            "magnitude": self.magnitude,
            "delta_V": self.delta_V,
            "max_deviation": self.max_deviation,
            "mean_deviation": self.mean_deviation,
            "return_time": self.return_time,
            "v_drift": self.v_drift,
        }


def perturb_state(s: State, spec: PerturbationSpec) -> State:
    if spec.direction is None:
        raise InvalidPerturbationError("perturb_state needs an explicit direction")
    dx, dy = spec.direction
    out = State(s.x + spec.magnitude * dx, s.y + spec.magnitude * dy)
    if not (out.x > 0 and out.y > 0):
        raise InvalidPerturbationError(f"perturbed state {out!r} is not positive")
    return out


def run_experiment(
    traj: Trajectory,
    p: SystemParams,
    spec: PerturbationSpec,
    return_threshold: float = DEFAULT_RETURN_THRESHOLD,
) -> PerturbationResult:
    """Integrate the perturbed and unperturbed states side by side for ``spec.horizon`` steps.

    ``return_time`` is the first time the separation drops below
    ``return_threshold``; LV orbits are neutrally stable, so it is often None.
    """
    if not 0 <= spec.index < len(traj):
        raise InvalidPerturbationError(f"index {spec.index} outside trajectory of length {len(traj)}")
    s = traj.state(spec.index)
    direction = spec.direction
    if direction is None:
        n = outward_normals(np.array([s]), p)[0]
        direction = (float(n[0]), float(n[1]))
        spec = PerturbationSpec(spec.index, spec.magnitude, spec.horizon, direction)
    s_pert = perturb_state(s, spec)
    t_start = traj.t0 + spec.index * traj.dt
    ref = simulate(p, s, traj.dt, spec.horizon, t0=t_start)
    pert = simulate(p, s_pert, traj.dt, spec.horizon, t0=t_start)
    diff = pert.states - ref.states
    dist = np.hypot(diff[:, 0], diff[:, 1])
    below = np.nonzero(dist < return_threshold)[0]
    return_time = float(below[0] * traj.dt) if len(below) else None
    v_pert = lyapunov_values(pert.states, p)
    v0 = v_pert[0]
    return PerturbationResult(
        index=spec.index,
        t=t_start,
        direction=direction,
        magnitude=spec.magnitude,
        delta_V=abs(lyapunov_value(s_pert, p) - lyapunov_value(s, p)),
        max_deviation=float(dist.max()),
        mean_deviation=float(dist.mean()),
        return_time=return_time,
        reference=ref,
        perturbed=pert,
        distance=dist,
        v_drift=float(np.max(np.abs(v_pert - v0)) / abs(v0)),
    )


@dataclass(frozen=True, eq=False)
class Comparison:
    high: PerturbationResult
    low: PerturbationResult
    ordering: dict  # metric -> "low" | "high" | "tie": which point shows the larger value

    @property
    def delta_V_ordering_holds(self) -> bool:
        return self.ordering["delta_V"] == "low"


def _which_larger(low: float, high: float) -> str:
    if low > high:
        return "low"
    if high > low:
        return "high"
    return "tie"


def compare_experiments(
    traj: Trajectory,
    p: SystemParams,
    high_idx: int,
    low_idx: int,
    magnitude: float = 3.0,
    horizon: int = 1,
    return_threshold: float = DEFAULT_RETURN_THRESHOLD,
) -> Comparison:
    """Perturb the high- and low-attention samples by the same amount along their outward normals."""
    high = run_experiment(traj, p, PerturbationSpec(high_idx, magnitude, horizon), return_threshold)
    low = run_experiment(traj, p, PerturbationSpec(low_idx, magnitude, horizon), return_threshold)
    ordering = {
        name: _which_larger(getattr(low, name), getattr(high, name))
        for name in ("delta_V", "max_deviation", "mean_deviation")
    }
    return Comparison(high, low, ordering)
