"""CSV/JSON artifact reading and writing.

All writes go to a temporary file in the target directory followed by
``os.replace``, so an interrupted run never leaves a truncated artifact.
Floats are written with 17 significant digits and so round-trip exactly.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path, header: list[str], columns) -> None:
    cols = [np.asarray(c) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header and column count differ")
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("columns differ in length")
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(
            str(int(v)) if isinstance(v, (int, np.integer)) else format_float(v) for v in row
        ))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_csv(path, expected_header: list[str] | None = None) -> dict[str, np.ndarray]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if expected_header is not None and header != expected_header:
            raise ValueError(f"{path.name}: expected header {expected_header}, got {header}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        data = np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, allow_nan=False) + "\n")


def read_json(path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        return json.load(fh)


TRAJECTORY_HEADER = ["t", "x", "y"]
NOISY_HEADER = ["t", "x_clean", "y_clean", "x_obs", "y_obs"]
PROFILE_HEADER = ["t", "attention_weight"]
LOSS_HEADER = ["epoch", "loss"]
LYAPUNOV_HEADER = ["t", "V", "gradV_x", "gradV_y", "dVdn"]
SURFACE_HEADER = ["x", "y", "V"]
EXPERIMENT_HEADER = ["t", "x_ref", "y_ref", "x_pert", "y_pert", "distance"]


def write_trajectory(path, traj) -> None:
    write_csv(path, TRAJECTORY_HEADER, [traj.times, traj.x, traj.y])


def write_noisy(path, noisy) -> None:
    base = noisy.base
    obs = noisy.observations
    write_csv(path, NOISY_HEADER, [base.times, base.x, base.y, obs[:, 0], obs[:, 1]])


def write_attention_profile(path, profile) -> None:
    write_csv(path, PROFILE_HEADER, [profile.times, profile.weights])


def write_loss_history(path, history) -> None:
    write_csv(path, LOSS_HEADER, [np.arange(len(history.losses)), np.asarray(history.losses, dtype=float)])


def write_lyapunov_profile(path, lyap) -> None:
    g = lyap.gradient
    write_csv(path, LYAPUNOV_HEADER, [lyap.times, lyap.value, g[:, 0], g[:, 1], lyap.normal_derivative])


def write_surface(path, x, y, v) -> None:
    write_csv(path, SURFACE_HEADER, [x, y, v])


def write_experiment(path, result) -> None:
    ref = result.reference.states
    pert = result.perturbed.states
    write_csv(
        path,
        EXPERIMENT_HEADER,
        [result.reference.times, ref[:, 0], ref[:, 1], pert[:, 0], pert[:, 1], result.distance],
    )
