"""Single-layer linear softmax attention over a window, trained with Adam.

For a window of normalised observations ``z_1..z_W`` the model computes

    score_i = w . z_i + b
    attn    = softmax(score)
    context = sum_i attn_i z_i
    pred    = A @ context + c

and is fitted so that ``pred`` matches the clean state at the window centre.
Parameters are carried as a flat vector ``[w0, w1, b, A00, A01, A10, A11, c0, c1]``
inside the training loop.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .errors import NumericError
from .observation import NoisyTrajectory, Normalization, WindowDataset, window_starts, window_view
from .rng import PortableRNG

N_PARAMS = 9
PARAM_NAMES = ("score_weights", "score_bias", "readout_matrix", "readout_bias")


@dataclass(frozen=True, eq=False)
class AttentionModel:
    score_weights: np.ndarray  # (2,)
    score_bias: float
    readout_matrix: np.ndarray  # (2, 2)
    readout_bias: np.ndarray  # (2,)

    def as_vector(self) -> np.ndarray:
        return np.concatenate(
            [
                np.asarray(self.score_weights, dtype=np.float64),
                [float(self.score_bias)],
                np.asarray(self.readout_matrix, dtype=np.float64).ravel(),
                np.asarray(self.readout_bias, dtype=np.float64),
            ]
        )

    @classmethod
    def from_vector(cls, theta) -> "AttentionModel":
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (N_PARAMS,):
            raise ValueError(f"expected {N_PARAMS} parameters, got shape {theta.shape}")
        return cls(theta[0:2].copy(), float(theta[2]), theta[3:7].reshape(2, 2).copy(), theta[7:9].copy())

    def to_dict(self) -> dict:
        return {
            "score_weights": [float(v) for v in self.score_weights],
            "score_bias": float(self.score_bias),
            "readout_matrix": [[float(v) for v in row] for row in self.readout_matrix],
            "readout_bias": [float(v) for v in self.readout_bias],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttentionModel":
        return cls(
            np.array(d["score_weights"], dtype=np.float64),
            float(d["score_bias"]),
            np.array(d["readout_matrix"], dtype=np.float64),
            np.array(d["readout_bias"], dtype=np.float64),
        )

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_vector())))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    epochs: int = 300
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("adam betas must lie in (0, 1)")
        if not self.adam_epsilon > 0:
            raise ValueError("adam_epsilon must be > 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainHistory:
    losses: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.losses)


@dataclass
class AdamState:
    m1: np.ndarray
    m2: np.ndarray

    @classmethod
    def zeros(cls, n: int = N_PARAMS) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n))


@dataclass(frozen=True, eq=False)
class AttentionProfile:
    t0: float
    dt: float
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.weights))


def init_model(seed: int) -> AttentionModel:
    """Uniform [-0.1, 0.1] draws; the readout matrix is identity plus such a draw."""
    u = PortableRNG(seed).uniform(-0.1, 0.1, N_PARAMS)
    u[3:7] += np.eye(2).ravel()
    return AttentionModel.from_vector(u)


def softmax(scores) -> np.ndarray:
    s = np.asarray(scores, dtype=np.float64)
    e = np.exp(s - s.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def forward(m: AttentionModel, window) -> tuple[np.ndarray, np.ndarray]:
    """Prediction and per-position attention for one (W, 2) window."""
    z = np.asarray(window, dtype=np.float64)
    if z.ndim != 2 or z.shape[1] != 2 or len(z) == 0:
        raise ValueError("window must be a non-empty (W, 2) array")
    attn = softmax(z @ m.score_weights + m.score_bias)
    context = attn @ z
    pred = m.readout_matrix @ context + m.readout_bias
    if not (np.all(np.isfinite(attn)) and np.all(np.isfinite(pred))):
        raise NumericError("non-finite value in forward pass")
    return pred, attn


def attention_rows(m: AttentionModel, windows: np.ndarray) -> np.ndarray:
    """Attention weights for a stack of windows, shape (n_windows, W)."""
    return softmax(windows @ m.score_weights + m.score_bias)


def _loss_grad(theta: np.ndarray, dataset: WindowDataset) -> tuple[float, np.ndarray]:
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    value, grad = kernels.attention_loss_grad(dataset.inputs, dataset.targets, theta)
    if not (math.isfinite(value) and np.all(np.isfinite(grad))):
        raise NumericError("non-finite loss or gradient")
    return value, grad


def loss(m: AttentionModel, dataset: WindowDataset) -> float:
    """Mean over windows of the squared Euclidean reconstruction error."""
    return _loss_grad(m.as_vector(), dataset)[0]


def gradients(m: AttentionModel, dataset: WindowDataset) -> AttentionModel:
    """Exact gradient of ``loss``, returned in the model's own parameter layout."""
    return AttentionModel.from_vector(_loss_grad(m.as_vector(), dataset)[1])


def adam_update(theta, state: AdamState, grad, cfg: TrainConfig, step_index: int):
    """One bias-corrected Adam step on flat arrays; returns (theta, state)."""
    if step_index < 1:
        raise ValueError("step_index must be >= 1")
    g = np.asarray(grad, dtype=np.float64)
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    m1 = b1 * state.m1 + (1.0 - b1) * g
    m2 = b2 * state.m2 + (1.0 - b2) * (g * g)
    m1_hat = m1 / (1.0 - b1**step_index)
    m2_hat = m2 / (1.0 - b2**step_index)
    theta = np.asarray(theta, dtype=np.float64) - cfg.learning_rate * m1_hat / (np.sqrt(m2_hat) + cfg.adam_epsilon)
    return theta, AdamState(m1, m2)


def adam_step(
    m: AttentionModel, opt_state: AdamState, grads: AttentionModel, cfg: TrainConfig, step_index: int
) -> tuple[AttentionModel, AdamState]:
    theta, opt_state = adam_update(m.as_vector(), opt_state, grads.as_vector(), cfg, step_index)
    return AttentionModel.from_vector(theta), opt_state


def train(
    dataset: WindowDataset, cfg: TrainConfig, model: AttentionModel | None = None
) -> tuple[AttentionModel, TrainHistory]:
    """Full-batch Adam for ``cfg.epochs`` epochs.

    ``history.losses[e]`` is the loss at the start of epoch ``e``, i.e. before
    that epoch's update.
    """
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    model = init_model(cfg.seed) if model is None else model
    theta = model.as_vector()
    state = AdamState.zeros()
    history = TrainHistory()
    for epoch in range(cfg.epochs):
        try:
            value, grad = _loss_grad(theta, dataset)
        except NumericError as exc:
            raise NumericError("training diverged", epoch) from exc
        history.losses.append(value)
        theta, state = adam_update(theta, state, grad, cfg, epoch + 1)
        if not np.all(np.isfinite(theta)):
            raise NumericError("non-finite parameters after update", epoch)
    return AttentionModel.from_vector(theta), history


def attention_profile(
    m: AttentionModel,
    noisy: NoisyTrajectory,
    window_len: int = 17,
    stride: int = 1,
    normalization: Normalization | None = None,
) -> AttentionProfile:
    """Per-sample attention: mean weight a sample receives over the windows containing it.

    The result is rescaled to sum to 1. Samples covered by no window (possible
    only when ``stride > window_len``) get zero weight.
    """
    starts = window_starts(len(noisy), window_len, stride)
    norm = normalization or Normalization.fit(noisy.observations)
    windows = window_view(norm.normalize(noisy.observations), starts, window_len)
    rows = attention_rows(m, windows)
    idx = starts[:, None] + np.arange(window_len)[None, :]
    total = np.bincount(idx.ravel(), weights=rows.ravel(), minlength=len(noisy))
    count = np.bincount(idx.ravel(), minlength=len(noisy))
    prof = np.divide(total, count, out=np.zeros_like(total), where=count > 0)
    s = prof.sum()
    if not (math.isfinite(s) and s > 0):
        raise NumericError("attention profile does not normalise")
    return AttentionProfile(noisy.base.t0, noisy.base.dt, prof / s)
