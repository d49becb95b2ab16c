"""Run configuration: flat ``key = value`` files with ``#`` comments."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .attention import TrainConfig
from .dynamics import State, SystemParams
from .errors import ConfigError


@dataclass(frozen=True)
class RunConfig:
    # system
    alpha: float = 0.6
    beta: float = 0.025
    gamma: float = 0.8
    delta: float = 0.02
    x0: float = 40.0
    y0: float = 9.0
    sigma: float = 2.0
    # integration
    dt: float = 0.01
    duration: float = 50.0
    # data and model
    noise_seed: int = 42
    init_seed: int = 0
    window_len: int = 17
    stride: int = 1
    learning_rate: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    epochs: int = 300
    # perturbation
    perturb_magnitude: float = 3.0
    perturb_horizon_periods: float = 2.0
    return_threshold: float = 0.5
    # analysis and output
    marker_fraction: float = 0.02
    spearman_gate: float = -0.3
    phase_gate: float = 0.1
    surface_x_min: float = 5.0
    surface_x_max: float = 100.0
    surface_y_min: float = 2.0
    surface_y_max: float = 60.0
    surface_nx: int = 200
    surface_ny: int = 200

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{f.name} must be finite")
        checks = [
            (self.dt > 0, "dt must be > 0"),
            (self.duration > 0, "duration must be > 0"),
            (self.x0 > 0 and self.y0 > 0, "initial state must be positive"),
            (self.sigma >= 0, "sigma must be >= 0"),
            (self.noise_seed >= 0 and self.init_seed >= 0, "seeds must be >= 0"),
            (self.window_len >= 1 and self.window_len % 2 == 1, "window_len must be odd and >= 1"),
            (self.stride >= 1, "stride must be >= 1"),
            (self.perturb_magnitude >= 0, "perturb_magnitude must be >= 0"),
            (self.perturb_horizon_periods > 0, "perturb_horizon_periods must be > 0"),
            (self.return_threshold > 0, "return_threshold must be > 0"),
            (0 < self.marker_fraction <= 0.5, "marker_fraction must lie in (0, 0.5]"),
            (self.surface_nx >= 2 and self.surface_ny >= 2, "surface grid needs >= 2 points per axis"),
            (self.surface_x_min < self.surface_x_max and self.surface_y_min < self.surface_y_max,
             "surface ranges must be increasing"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        if self.n_steps < 1:
            raise ConfigError("duration must cover at least one step")
        try:
            self.params
            self.train_config
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def params(self) -> SystemParams:
        return SystemParams(self.alpha, self.beta, self.gamma, self.delta)

    @property
    def initial_state(self) -> State:
        return State(self.x0, self.y0)

    @property
    def train_config(self) -> TrainConfig:
        return TrainConfig(
            self.learning_rate, self.adam_beta1, self.adam_beta2, self.adam_epsilon, self.epochs, self.init_seed
        )

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        return "".join(f"{k} = {v!r}\n" for k, v in self.to_dict().items())

    def with_overrides(self, overrides: dict[str, str]) -> "RunConfig":
        return replace(self, **_coerce(overrides))


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        if key not in _TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        kind = _TYPES[key]
        try:
            if kind == "int":
                if isinstance(value, float) and value != int(value):
                    raise ValueError
                out[key] = int(value) if not isinstance(value, str) else int(value.strip())
            else:
                out[key] = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return out


def parse_config_text(text: str) -> dict[str, str]:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        raw[key] = value
    return raw


def load_config(path=None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Defaults, then the file at ``path``, then ``overrides``.

    A ``.json`` path is read as a report/model file and its ``config`` echo is used.
    """
    raw: dict = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        if path.suffix == ".json":
            try:
                raw = dict(json.loads(text)["config"])
            except (ValueError, KeyError, TypeError):
                raise ConfigError(f"{path} has no 'config' block") from None
        else:
            raw = parse_config_text(text)
    raw.update(overrides or {})
    return RunConfig(**_coerce(raw))
