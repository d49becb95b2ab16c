"""Correlation and phase statistics comparing an attention profile with dV/dn."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attention import AttentionProfile
from .errors import InsufficientDataError, UndefinedCorrelationError
from .lyapunov import LyapunovProfile, profile_extrema

SPEARMAN_GATE = -0.3
PHASE_GATE = 0.1


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValueError("pearson needs two 1-d sequences of equal length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    saa = float(da @ da)
    sbb = float(db @ db)
    if saa == 0 or sbb == 0:
        raise UndefinedCorrelationError("correlation undefined for a constant sequence")
    r = float(da @ db) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


def average_ranks(a) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they occupy."""
    a = np.asarray(a, dtype=np.float64)
    _, inverse, counts = np.unique(a, return_inverse=True, return_counts=True)
    first = np.cumsum(counts) - counts  # ranks occupied before each distinct value
    return (first + (counts + 1) / 2.0)[inverse]


def spearman(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("sequences must have equal length")
    return pearson(average_ranks(a), average_ranks(b))


def phase_offset(idx_a: int, idx_b: int, period_samples: int) -> float:
    """Circular distance between two sample indices as a fraction of the period, in [0, 0.5]."""
    if period_samples < 1:
        raise ValueError("period_samples must be >= 1")
    k = abs(int(idx_a) - int(idx_b)) % period_samples
    return min(k, period_samples - k) / period_samples


@dataclass
class CorrespondenceReport:
    pearson: float
    spearman: float
    attention_argmax_index: int
    attention_argmin_index: int
    dvdn_argmin_index: int
    dvdn_argmax_index: int
    phase_offset_max_to_min: float
    phase_offset_min_to_max: float
    period_samples: int
    t0: float
    dt: float
    window_start: int
    window_stop: int
    config: dict = field(default_factory=dict)
    perturbation: dict | None = None

    @property
    def period(self) -> float:
        return self.period_samples * self.dt

    def time_of(self, index: int) -> float:
        return self.t0 + index * self.dt

    def headline_holds(self, spearman_max: float = SPEARMAN_GATE, phase_max: float = PHASE_GATE) -> bool:
        return (
            self.spearman <= spearman_max
            and self.phase_offset_max_to_min < phase_max
            and self.phase_offset_min_to_max < phase_max
        )

    def to_dict(self) -> dict:
        d = {
            "pearson": self.pearson,
            "spearman": self.spearman,
            "attention_argmax_t": self.time_of(self.attention_argmax_index),
            "attention_argmin_t": self.time_of(self.attention_argmin_index),
            "dvdn_argmin_t": self.time_of(self.dvdn_argmin_index),
            "dvdn_argmax_t": self.time_of(self.dvdn_argmax_index),
            "phase_offset_max_to_min": self.phase_offset_max_to_min,
            "phase_offset_min_to_max": self.phase_offset_min_to_max,
            "period": self.period,
            "indices": {
                "attention_argmax": self.attention_argmax_index,
                "attention_argmin": self.attention_argmin_index,
                "dvdn_argmin": self.dvdn_argmin_index,
                "dvdn_argmax": self.dvdn_argmax_index,
                "period_samples": self.period_samples,
                "window_start": self.window_start,
                "window_stop": self.window_stop,
            },
            "t0": self.t0,
            "dt": self.dt,
            "headline_holds": self.headline_holds(),
            "config": self.config,
        }
        if self.perturbation is not None:
            d["perturbation"] = self.perturbation
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CorrespondenceReport":
        idx = d["indices"]
        return cls(
            pearson=d["pearson"],
            spearman=d["spearman"],
            attention_argmax_index=idx["attention_argmax"],
            attention_argmin_index=idx["attention_argmin"],
            dvdn_argmin_index=idx["dvdn_argmin"],
            dvdn_argmax_index=idx["dvdn_argmax"],
            phase_offset_max_to_min=d["phase_offset_max_to_min"],
            phase_offset_min_to_max=d["phase_offset_min_to_max"],
            period_samples=idx["period_samples"],
            t0=d["t0"],
            dt=d["dt"],
            window_start=idx["window_start"],
            window_stop=idx["window_stop"],
            config=d.get("config", {}),
            perturbation=d.get("perturbation"),
        )


def analysis_window(n_samples: int, period_samples: int, warmup: int | None = None) -> tuple[int, int]:
    """[start, stop) covering whole periods after a warm-up prefix (default half a period)."""
    if period_samples < 1:
        raise ValueError("period_samples must be >= 1")
    start = period_samples // 2 if warmup is None else warmup
    n_periods = (n_samples - start) // period_samples
    if n_periods < 1:
        raise InsufficientDataError(
            f"{n_samples} samples leave no whole period of {period_samples} after warm-up {start}"
        )
    return start, start + n_periods * period_samples


def build_report(
    attn: AttentionProfile,
    lyap: LyapunovProfile,
    period_samples: int,
    warmup: int | None = None,
    config: dict | None = None,
) -> CorrespondenceReport:
    if len(attn) != len(lyap):
        raise ValueError("attention and Lyapunov profiles differ in length")
    start, stop = analysis_window(len(attn), period_samples, warmup)
    a = attn.weights[start:stop]
    d = lyap.normal_derivative[start:stop]
    a_min, a_max = profile_extrema(a, period_samples)
    d_min, d_max = profile_extrema(d, period_samples)
    return CorrespondenceReport(
        pearson=pearson(a, d),
        spearman=spearman(a, d),
        attention_argmax_index=start + a_max,
        attention_argmin_index=start + a_min,
        dvdn_argmin_index=start + d_min,
        dvdn_argmax_index=start + d_max,
        phase_offset_max_to_min=phase_offset(a_max, d_min, period_samples),
        phase_offset_min_to_max=phase_offset(a_min, d_max, period_samples),
        period_samples=period_samples,
        t0=attn.t0,
        dt=attn.dt,
        window_start=start,
        window_stop=stop,
        config=dict(config or {}),
    )


def marker_indices(weights, start: int, period_samples: int, fraction: float = 0.02) -> tuple[np.ndarray, np.ndarray]:
    """Indices of the top and bottom ``fraction`` of weights within one period from ``start``."""
    w = np.asarray(weights, dtype=np.float64)[start : start + period_samples]
    k = max(1, int(round(fraction * len(w))))
    order = np.argsort(w, kind="stable")
    return np.sort(order[-k:]) + start, np.sort(order[:k]) + start
