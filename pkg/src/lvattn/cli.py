"""Command-line driver: ``lvattn {simulate,train,analyze,perturb,pipeline}``.

Stages communicate only through fixed filenames in the output directory.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io, kernels
from .analysis import build_report, marker_indices
from .attention import AttentionModel, AttentionProfile, attention_profile, train
from .config import RunConfig, load_config
from .dynamics import Trajectory, period_estimate, simulate
from .errors import (
    ConfigError,
    InsufficientDataError,
    IntegrationError,
    InvalidPerturbationError,
    NumericError,
)
from .lyapunov import normal_derivative_profile, surface_grid
from .observation import NoisyTrajectory, add_noise, make_windows
from .perturbation import compare_experiments
from .plots import Figure, padded

log = logging.getLogger("lvattn")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_TRAINING = 4
EXIT_PERTURBATION = 5

ARTIFACTS = {
    "simulate": ["trajectory.csv", "noisy.csv"],
    "train": ["model.json", "attention_profile.csv", "loss.csv"],
    "analyze": [
        "report.json",
        "lyapunov_profile.csv",
        "surface.csv",
        "fig_time_series.svg",
        "fig_phase_space.svg",
        "fig_attention_vs_dvdn.svg",
    ],
    "perturb": ["perturb_high.csv", "perturb_low.csv", "fig_perturbations.svg"],
}


def _require(out: Path, *names: str) -> None:
    missing = [n for n in names if not (out / n).is_file()]
    if missing:
        raise ConfigError(f"missing input artifacts in {out}: {', '.join(missing)}")


def _load_trajectory(out: Path, cfg: RunConfig) -> Trajectory:
    cols = io.read_csv(out / "trajectory.csv", io.TRAJECTORY_HEADER)
    if len(cols["t"]) == 0:
        raise ConfigError("trajectory.csv is empty")
    return Trajectory(float(cols["t"][0]), cfg.dt, np.stack([cols["x"], cols["y"]], axis=1))


def _load_noisy(out: Path, cfg: RunConfig) -> NoisyTrajectory:
    cols = io.read_csv(out / "noisy.csv", io.NOISY_HEADER)
    base = Trajectory(float(cols["t"][0]), cfg.dt, np.stack([cols["x_clean"], cols["y_clean"]], axis=1))
    obs = np.stack([cols["x_obs"], cols["y_obs"]], axis=1)
    return NoisyTrajectory(base, obs, cfg.sigma, cfg.noise_seed)


def _period_samples(traj: Trajectory, cfg: RunConfig) -> int:
    return max(1, int(round(period_estimate(traj, cfg.params.x_eq) / traj.dt)))


def cmd_simulate(cfg: RunConfig, out: Path) -> None:
    traj = simulate(cfg.params, cfg.initial_state, cfg.dt, cfg.n_steps)
    noisy = add_noise(traj, cfg.sigma, cfg.noise_seed)
    io.write_trajectory(out / "trajectory.csv", traj)
    io.write_noisy(out / "noisy.csv", noisy)
    log.info("simulated %d samples", len(traj))


def cmd_train(cfg: RunConfig, out: Path) -> None:
    if not (out / "noisy.csv").is_file():
        cmd_simulate(cfg, out)
    noisy = _load_noisy(out, cfg)
    dataset = make_windows(noisy, cfg.window_len, cfg.stride)
    tcfg = cfg.train_config
    model, history = train(dataset, tcfg)
    profile = attention_profile(model, noisy, cfg.window_len, cfg.stride, dataset.normalization)
    doc = model.to_dict()
    doc["normalization"] = {
        "mean": [float(v) for v in dataset.normalization.mean],
        "std": [float(v) for v in dataset.normalization.std],
    }
    doc["train_config"] = tcfg.to_dict()
    doc["final_loss"] = history.losses[-1] if history.losses else None
    doc["backend"] = kernels.BACKEND
    doc["config"] = cfg.to_dict()
    io.write_json(out / "model.json", doc)
    io.write_attention_profile(out / "attention_profile.csv", profile)
    io.write_loss_history(out / "loss.csv", history)
    if history.losses:
        log.info("trained %d epochs, loss %.6g -> %.6g", len(history), history.losses[0], history.losses[-1])


def cmd_analyze(cfg: RunConfig, out: Path) -> None:
    _require(out, "trajectory.csv", "model.json", "attention_profile.csv")
    traj = _load_trajectory(out, cfg)
    cols = io.read_csv(out / "attention_profile.csv", io.PROFILE_HEADER)
    attn = AttentionProfile(float(cols["t"][0]), cfg.dt, cols["attention_weight"])
    p = cfg.params
    period = _period_samples(traj, cfg)
    lyap = normal_derivative_profile(traj, p, period)
    echo = cfg.to_dict()
    report = build_report(attn, lyap, period, config=echo)
    doc = report.to_dict()
    doc["backend"] = kernels.BACKEND
    io.write_json(out / "report.json", doc)
    io.write_lyapunov_profile(out / "lyapunov_profile.csv", lyap)
    gx, gy, gv = surface_grid(
        p, (cfg.surface_x_min, cfg.surface_x_max), (cfg.surface_y_min, cfg.surface_y_max),
        cfg.surface_nx, cfg.surface_ny,
    )
    io.write_surface(out / "surface.csv", gx, gy, gv)

    high, low = [], []
    for start in range(report.window_start, report.window_stop, period):
        h, lo = marker_indices(attn.weights, start, period, cfg.marker_fraction)
        high.append(h)
        low.append(lo)
    high = np.concatenate(high)
    low = np.concatenate(low)
    io.atomic_write_text(out / "fig_time_series.svg", _fig_time_series(traj, high, low))
    io.atomic_write_text(out / "fig_phase_space.svg", _fig_phase_space(traj, high, low, p))
    io.atomic_write_text(out / "fig_attention_vs_dvdn.svg", _fig_attention_vs_dvdn(attn, lyap, report))
    log.info("spearman %.4f, pearson %.4f", report.spearman, report.pearson)


def cmd_perturb(cfg: RunConfig, out: Path) -> None:
    _require(out, "trajectory.csv", "report.json")
    traj = _load_trajectory(out, cfg)
    doc = io.read_json(out / "report.json")
    try:
        idx = doc["indices"]
        high_idx, low_idx = int(idx["attention_argmax"]), int(idx["attention_argmin"])
        period = int(idx["period_samples"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("report.json lacks attention extrema indices") from None
    horizon = max(1, int(round(cfg.perturb_horizon_periods * period)))
    cmp = compare_experiments(
        traj, cfg.params, high_idx, low_idx, cfg.perturb_magnitude, horizon, cfg.return_threshold
    )
    io.write_experiment(out / "perturb_high.csv", cmp.high)
    io.write_experiment(out / "perturb_low.csv", cmp.low)
    io.atomic_write_text(out / "fig_perturbations.svg", _fig_perturbations(traj, cmp, period))
    doc["perturbation"] = {
        "high": cmp.high.summary(),
        "low": cmp.low.summary(),
        "larger_at": cmp.ordering,
        "delta_V_ordering_holds": cmp.delta_V_ordering_holds,
        "horizon_steps": horizon,
        "return_threshold": cfg.return_threshold,
    }
    io.write_json(out / "report.json", doc)
    log.info("delta_V high %.4g, low %.4g", cmp.high.delta_V, cmp.low.delta_V)


def cmd_pipeline(cfg: RunConfig, out: Path) -> None:
    for stage in (cmd_simulate, cmd_train, cmd_analyze, cmd_perturb):
        stage(cfg, out)


COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "analyze": cmd_analyze,
    "perturb": cmd_perturb,
    "pipeline": cmd_pipeline,
}


def _fig_time_series(traj, high, low) -> str:
    fig = Figure(900, 450)
    t = traj.times
    ax = fig.panel(padded(t, 0.01), (0, float(max(traj.x.max(), traj.y.max())) * 1.08),
                   title="Populations with high/low-attention samples", xlabel="time", ylabel="population")
    ax.line(t, traj.x, "#555555", label="prey")
    ax.line(t, traj.y, "#999999", dash="5,3", label="predator")
    ax.markers(t[high], traj.x[high], "red", "circle", 3.5, label="high attention (prey)")
    ax.markers(t[high], traj.y[high], "darkred", "triangle", 4, label="high attention (predator)")
    ax.markers(t[low], traj.x[low], "blue", "circle", 3.5, label="low attention (prey)")
    ax.markers(t[low], traj.y[low], "darkblue", "triangle", 4, label="low attention (predator)")
    return fig.to_svg()


def _fig_phase_space(traj, high, low, p) -> str:
    fig = Figure(600, 550)
    ax = fig.panel(padded(traj.x), padded(traj.y), title="Phase space", xlabel="prey x", ylabel="predator y")
    ax.line(traj.x, traj.y, "#777777", label="orbit")
    ax.markers([p.x_eq], [p.y_eq], "black", "cross", 4, label="equilibrium")
    ax.markers(traj.x[high], traj.y[high], "red", "circle", 3.5, label="high attention")
    ax.markers(traj.x[low], traj.y[low], "blue", "circle", 3.5, label="low attention")
    return fig.to_svg()


def _fig_attention_vs_dvdn(attn, lyap, report) -> str:
    fig = Figure(900, 600)
    sl = slice(report.window_start, report.window_stop)
    t = attn.times[sl]
    a = attn.weights[sl]
    d = lyap.normal_derivative[sl]
    xlim = (float(t[0]), float(t[-1]))
    top = fig.panel(xlim, padded(a), box=(80, 40, 790, 220), title="Attention weight", ylabel="weight")
    top.line(t, a, "#cc3333")
    top.markers([attn.times[report.attention_argmax_index]], [attn.weights[report.attention_argmax_index]],
                "red", "circle", 5, label="attention max")
    top.markers([attn.times[report.attention_argmin_index]], [attn.weights[report.attention_argmin_index]],
                "blue", "circle", 5, label="attention min")
    bot = fig.panel(xlim, padded(d), box=(80, 320, 790, 220), title="Normal derivative of V",
                    xlabel="time", ylabel="dV/dn")
    bot.line(t, d, "#3355aa")
    bot.markers([lyap.times[report.dvdn_argmin_index]], [lyap.normal_derivative[report.dvdn_argmin_index]],
                "red", "circle", 5, label="dV/dn min")
    bot.markers([lyap.times[report.dvdn_argmax_index]], [lyap.normal_derivative[report.dvdn_argmax_index]],
                "blue", "circle", 5, label="dV/dn max")
    return fig.to_svg()


def _fig_perturbations(traj, cmp, period) -> str:
    ref = traj.states[: period + 1]
    allx = np.concatenate([ref[:, 0], cmp.high.perturbed.x, cmp.low.perturbed.x])
    ally = np.concatenate([ref[:, 1], cmp.high.perturbed.y, cmp.low.perturbed.y])
    fig = Figure(600, 550)
    ax = fig.panel(padded(allx), padded(ally), title="Perturbed orbits", xlabel="prey x", ylabel="predator y")
    ax.line(ref[:, 0], ref[:, 1], "green", dash="6,4", label="unperturbed cycle")
    ax.line(cmp.high.perturbed.x, cmp.high.perturbed.y, "red", label="kick at high attention")
    ax.line(cmp.low.perturbed.x, cmp.low.perturbed.y, "blue", label="kick at low attention")
    ax.markers([cmp.high.reference.x[0]], [cmp.high.reference.y[0]], "red", "cross", 7)
    ax.markers([cmp.low.reference.x[0]], [cmp.low.reference.y[0]], "blue", "cross", 7)
    return fig.to_svg()


def _parse_set(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lvattn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value file, or a report/model JSON whose config block is reused")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one key")
        sp.add_argument("--out", default="out", help="output directory (default: out)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config, _parse_set(args.set))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, out)
    except (ConfigError, InsufficientDataError) as exc:
        print(f"lvattn: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"lvattn: integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except NumericError as exc:
        print(f"lvattn: training failure: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except InvalidPerturbationError as exc:
        print(f"lvattn: perturbation error: {exc}", file=sys.stderr)
        return EXIT_PERTURBATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
