"""Noisy observations of a clean trajectory and sliding-window training sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .errors import InsufficientDataError
from .rng import PortableRNG

OBSERVATION_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class NoisyTrajectory:
    base: Trajectory
    observations: np.ndarray  # (n, 2)
    sigma: float
    seed: int

    def __len__(self) -> int:
        return len(self.observations)


def add_noise(traj: Trajectory, sigma: float, seed: int) -> NoisyTrajectory:
    """Additive i.i.d. Gaussian noise, x noise and y noise interleaved per sample.

    Observations are floored at ``OBSERVATION_FLOOR`` so they stay positive.
    """
    if not sigma >= 0:
        raise ValueError("sigma must be >= 0")
    n = len(traj)
    if sigma == 0:
        obs = traj.states.copy()
    else:
        eps = PortableRNG(seed).normal(2 * n, sigma).reshape(n, 2)
        obs = np.maximum(traj.states + eps, OBSERVATION_FLOOR)
    obs.setflags(write=False)
    return NoisyTrajectory(traj, obs, float(sigma), int(seed))


@dataclass(frozen=True)
class Normalization:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, values: np.ndarray) -> "Normalization":
        values = np.asarray(values, dtype=np.float64)
        std = values.std(axis=0)
        # constant coordinates (e.g. a noise-free equilibrium run) are left unscaled
        std = np.where(std > 0, std, 1.0)
        return cls(values.mean(axis=0), std)

    def normalize(self, v):
        return (np.asarray(v, dtype=np.float64) - self.mean) / self.std

    def denormalize(self, z):
        return np.asarray(z, dtype=np.float64) * self.std + self.mean


@dataclass(frozen=True, eq=False)
class WindowDataset:
    window_len: int
    stride: int
    inputs: np.ndarray  # (n_windows, window_len, 2), normalised observations
    targets: np.ndarray  # (n_windows, 2), normalised clean centre states
    starts: np.ndarray  # (n_windows,)
    normalization: Normalization

    def __len__(self) -> int:
        return len(self.inputs)

    @property
    def centers(self) -> np.ndarray:
        return self.starts + self.window_len // 2


def window_starts(n_samples: int, window_len: int, stride: int) -> np.ndarray:
    if window_len < 1 or window_len % 2 == 0:
        raise ValueError("window_len must be odd and >= 1")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if n_samples < window_len:
        raise InsufficientDataError(
            f"trajectory has {n_samples} samples, window needs {window_len}"
        )
    return np.arange(0, n_samples - window_len + 1, stride)


def window_view(values: np.ndarray, starts: np.ndarray, window_len: int) -> np.ndarray:
    idx = starts[:, None] + np.arange(window_len)[None, :]
    return np.ascontiguousarray(values[idx])


def make_windows(noisy: NoisyTrajectory, window_len: int = 17, stride: int = 1) -> WindowDataset:
    starts = window_starts(len(noisy), window_len, stride)
    norm = Normalization.fit(noisy.observations)
    z_obs = norm.normalize(noisy.observations)
    z_clean = norm.normalize(noisy.base.states)
    inputs = window_view(z_obs, starts, window_len)
    targets = np.ascontiguousarray(z_clean[starts + window_len // 2])
    return WindowDataset(window_len, stride, inputs, targets, starts, norm)
