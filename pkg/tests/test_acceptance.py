"""Exit criteria for the package, one test per criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per criterion
in the terminal summary.
"""
import time

import numpy as np
import pytest

from lvattn.analysis import build_report
from lvattn.attention import AttentionModel, TrainConfig, attention_profile, gradients, loss, train
from lvattn.cli import main
from lvattn.dynamics import State, SystemParams, lv_field, period_estimate, simulate
from lvattn.lyapunov import (
    lyapunov_gradient,
    lyapunov_gradients,
    lyapunov_value,
    lyapunov_values,
    normal_derivative_profile,
)
from lvattn.observation import add_noise, make_windows
from lvattn.perturbation import PerturbationSpec, compare_experiments, run_experiment

P = SystemParams()
S0 = State(40.0, 9.0)
ALT_NOISE_SEEDS = (1, 2, 3, 4, 5)


def run_correspondence(noise_seed: int):
    traj = simulate(P, S0, 0.01, 5000)
    noisy = add_noise(traj, 2.0, noise_seed)
    ds = make_windows(noisy, 17, 1)
    model, _ = train(ds, TrainConfig())
    prof = attention_profile(model, noisy, 17, 1, ds.normalization)
    period = int(round(period_estimate(traj, P.x_eq) / traj.dt))
    lyap = normal_derivative_profile(traj, P, period)
    return traj, build_report(prof, lyap, period)


def test_criterion_1_conservation(criterion):
    start = time.perf_counter()
    traj = simulate(P, S0, 0.01, 5000)
    v = lyapunov_values(traj.states, P)
    drift = float(np.max(np.abs(v - v[0])) / abs(v[0]))

    t_end = 9.6

    def endpoint(dt):
        return simulate(P, S0, dt, int(round(t_end / dt))).states[-1]

    ref = endpoint(0.0001)
    ratio = float(np.linalg.norm(endpoint(0.02) - ref) / np.linalg.norm(endpoint(0.01) - ref))
    elapsed = time.perf_counter() - start
    ok = drift < 1e-6 and ratio >= 15 and elapsed < 1.0
    criterion(ok, f"V drift {drift:.2e} (<1e-6), order ratio {ratio:.2f} (>=15), {elapsed:.3f}s (<1s)")
    assert drift < 1e-6
    assert ratio >= 15
    assert elapsed < 1.0


def test_criterion_2_gradients(criterion, default_traj):
    noisy = add_noise(default_traj, 2.0, 42)
    ds = make_windows(noisy, 17, 3)
    worst = 0.0
    h = 1e-5
    for seed in range(5):
        r = np.random.default_rng(seed)
        theta = np.concatenate([r.normal(0, 1, 3), (np.eye(2) + r.normal(0, 0.3, (2, 2))).ravel(), r.normal(0, 0.3, 2)])
        g = gradients(AttentionModel.from_vector(theta), ds).as_vector()
        for i in range(9):
            up, dn = theta.copy(), theta.copy()
            up[i] += h
            dn[i] -= h
            fd = (loss(AttentionModel.from_vector(up), ds) - loss(AttentionModel.from_vector(dn), ds)) / (2 * h)
            if i == 2:
                # score bias: identically zero through the softmax
                assert abs(g[i]) < 1e-12 and abs(fd) < 1e-9
                continue
            worst = max(worst, abs(g[i] - fd) / max(abs(g[i]), abs(fd)))

    r = np.random.default_rng(99)
    worst_v = 0.0
    hv = 1e-6
    for x, y in r.uniform(1.0, 120.0, size=(100, 2)):
        g = np.array(lyapunov_gradient(State(x, y), P))
        fd = np.array([
            (lyapunov_value(State(x + hv, y), P) - lyapunov_value(State(x - hv, y), P)) / (2 * hv),
            (lyapunov_value(State(x, y + hv), P) - lyapunov_value(State(x, y - hv), P)) / (2 * hv),
        ])
        worst_v = max(worst_v, float(np.linalg.norm(g - fd) / np.linalg.norm(g)))
    ok = worst < 1e-4 and worst_v < 1e-6
    criterion(ok, f"attention max rel err {worst:.2e} (<1e-4), grad V max rel err {worst_v:.2e} (<1e-6)")
    assert worst < 1e-4
    assert worst_v < 1e-6


def test_criterion_3_training(criterion, default_dataset):
    start = time.perf_counter()
    _, h1 = train(default_dataset, TrainConfig())
    _, h2 = train(default_dataset, TrainConfig())
    elapsed = time.perf_counter() - start
    ratio = h1.losses[-1] / h1.losses[0]
    same = h1.losses == h2.losses
    ok = ratio < 0.5 and same and elapsed < 60
    criterion(ok, f"final/initial loss {ratio:.3f} (<0.5), bit-identical rerun {same}, {elapsed:.2f}s (<60s)")
    assert ratio < 0.5
    assert same
    assert elapsed < 60


def _gate(rep) -> bool:
    return rep.spearman <= -0.3 and rep.phase_offset_max_to_min < 0.1 and rep.phase_offset_min_to_max < 0.1


def test_criterion_4_headline_correspondence(criterion):
    _, default = run_correspondence(42)
    alts = {seed: run_correspondence(seed)[1] for seed in ALT_NOISE_SEEDS}
    n_alt = sum(_gate(r) for r in alts.values())
    ok = _gate(default) and n_alt >= 3
    detail = (
        f"seed 42: spearman {default.spearman:+.3f} (<=-0.3), phase max->min "
        f"{default.phase_offset_max_to_min:.3f}, min->max {default.phase_offset_min_to_max:.3f} (<0.1); "
        f"alt seeds passing {n_alt}/5 (>=3); alt spearman "
        + ", ".join(f"{s}:{r.spearman:+.3f}" for s, r in alts.items())
    )
    criterion(ok, detail)
    assert default.spearman <= -0.3
    assert default.phase_offset_max_to_min < 0.1
    assert default.phase_offset_min_to_max < 0.1
    assert n_alt >= 3


def test_criterion_5_perturbation_ordering(criterion):
    traj, rep = run_correspondence(42)
    horizon = 2 * rep.period_samples
    cmp = compare_experiments(traj, P, rep.attention_argmax_index, rep.attention_argmin_index, 3.0, horizon)

    idx = rep.attention_argmax_index
    g = np.array(lyapunov_gradient(traj.state(idx), P))
    gn = float(np.linalg.norm(g))
    eps = 1e-4
    taylor = run_experiment(traj, P, PerturbationSpec(idx, eps, 5, tuple(g / gn)))
    taylor_rel = abs(taylor.delta_V - eps * gn) / (eps * gn)
    ok = cmp.low.delta_V > cmp.high.delta_V and taylor_rel < 1e-2
    criterion(
        ok,
        f"delta_V low {cmp.low.delta_V:.4f} vs high {cmp.high.delta_V:.4f} (low > high); "
        f"Taylor rel err {taylor_rel:.1e} (<1e-2)",
    )
    assert taylor_rel < 1e-2
    assert cmp.low.delta_V > cmp.high.delta_V


def test_criterion_6_geometry(criterion, default_traj):
    f = lv_field(default_traj.states, P)
    g = lyapunov_gradients(default_traj.states, P)
    cos = np.abs(np.einsum("nd,nd->n", g, f)) / (np.linalg.norm(g, axis=1) * np.linalg.norm(f, axis=1))
    worst = float(cos.max())
    at_eq = lyapunov_gradient(State(40.0, 24.0), P)
    ok = worst < 1e-9 and at_eq == (0.0, 0.0)
    criterion(ok, f"max |gradV.f|/(|gradV||f|) {worst:.1e} (<1e-9), gradV(40, 24) = {at_eq}")
    assert worst < 1e-9
    assert at_eq == (0.0, 0.0)


def test_criterion_7_end_to_end_determinism(criterion, tmp_path):
    trees = []
    for name in ("run1", "run2"):
        out = tmp_path / name
        assert main(["pipeline", "--out", str(out)]) == 0
        trees.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    same = trees[0] == trees[1]
    criterion(same, f"{len(trees[0])} files, byte-identical {same}")
    assert same
