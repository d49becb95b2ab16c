import math

import numpy as np
import pytest

from lvattn import kernels
from lvattn.attention import (
    AdamState,
    AttentionModel,
    TrainConfig,
    adam_step,
    adam_update,
    attention_profile,
    attention_rows,
    forward,
    gradients,
    init_model,
    loss,
    softmax,
    train,
)
from lvattn.errors import NumericError
from lvattn.observation import add_noise, make_windows


def random_model(seed, scale=1.0):
    r = np.random.default_rng(seed)
    return AttentionModel(
        r.normal(0, scale, 2), float(r.normal(0, scale)), np.eye(2) + r.normal(0, 0.3, (2, 2)), r.normal(0, 0.3, 2)
    )


def naive_loss(m, ds):
    total = 0.0
    for window, target in zip(ds.inputs, ds.targets):
        scores = [m.score_weights[0] * z[0] + m.score_weights[1] * z[1] + m.score_bias for z in window]
        top = max(scores)
        e = [math.exp(s - top) for s in scores]
        z_sum = sum(e)
        cx = sum(ei / z_sum * z[0] for ei, z in zip(e, window))
        cy = sum(ei / z_sum * z[1] for ei, z in zip(e, window))
        A, c = m.readout_matrix, m.readout_bias
        px = A[0, 0] * cx + A[0, 1] * cy + c[0]
        py = A[1, 0] * cx + A[1, 1] * cy + c[1]
        total += (px - target[0]) ** 2 + (py - target[1]) ** 2
    return total / len(ds)


def fd_gradient(m, ds, h=1e-5):
    theta = m.as_vector()
    g = np.empty_like(theta)
    for i in range(len(theta)):
        up, dn = theta.copy(), theta.copy()
        up[i] += h
        dn[i] -= h
        g[i] = (loss(AttentionModel.from_vector(up), ds) - loss(AttentionModel.from_vector(dn), ds)) / (2 * h)
    return g


class TestInit:
    def test_deterministic(self):
        assert np.array_equal(init_model(3).as_vector(), init_model(3).as_vector())

    def test_seed_matters(self):
        assert not np.array_equal(init_model(0).as_vector(), init_model(1).as_vector())

    @pytest.mark.parametrize("seed", range(10))
    def test_bands(self, seed):
        m = init_model(seed)
        assert np.all(np.abs(m.score_weights) <= 0.1)
        assert abs(m.score_bias) <= 0.1
        assert np.all(np.abs(m.readout_matrix - np.eye(2)) <= 0.1)
        assert np.all(np.abs(m.readout_bias) <= 0.1)

    def test_vector_and_dict_round_trip(self):
        m = random_model(0)
        assert np.array_equal(AttentionModel.from_vector(m.as_vector()).as_vector(), m.as_vector())
        assert np.array_equal(AttentionModel.from_dict(m.to_dict()).as_vector(), m.as_vector())


class TestForward:
    def test_identical_inputs_give_uniform_attention(self):
        m = random_model(1)
        z = np.tile([0.3, -1.2], (5, 1))
        pred, attn = forward(m, z)
        assert np.allclose(attn, 0.2)
        assert np.allclose(pred, m.readout_matrix @ z[0] + m.readout_bias)

    def test_zero_score_weights(self, rng):
        m = AttentionModel(np.zeros(2), 0.7, np.eye(2), np.zeros(2))
        _, attn = forward(m, rng.normal(size=(9, 2)))
        assert np.allclose(attn, 1 / 9)

    def test_hand_softmax(self):
        # scores w.z with w = (1, 0): 0, ln 2, ln 4
        m = AttentionModel(np.array([1.0, 0.0]), 0.0, np.eye(2), np.zeros(2))
        window = np.array([[0.0, 5.0], [math.log(2), -1.0], [math.log(4), 2.0]])
        _, attn = forward(m, window)
        assert np.allclose(attn, [1 / 7, 2 / 7, 4 / 7], rtol=0, atol=1e-15)

    def test_softmax_shift_invariance(self, rng):
        s = rng.normal(size=11)
        assert np.allclose(softmax(s + 100.0), softmax(s), rtol=0, atol=1e-9)
        assert np.all(np.isfinite(softmax(s * 1000)))

    def test_rows_sum_to_one(self, default_dataset):
        rows = attention_rows(random_model(2, 3.0), default_dataset.inputs)
        assert np.all(rows >= 0)
        assert np.allclose(rows.sum(axis=1), 1.0, rtol=0, atol=1e-12)

    def test_rejects_empty_window(self):
        with pytest.raises(ValueError):
            forward(init_model(0), np.empty((0, 2)))

    def test_non_finite_raises(self):
        with pytest.raises(NumericError):
            forward(init_model(0), np.array([[math.nan, 0.0]]))


class TestLoss:
    def test_perfect_predictor_has_zero_loss(self):
        ds = make_windows(add_noise(_const_traj(), 0.0, 0), 3, 1)
        m = AttentionModel(np.zeros(2), 0.0, np.eye(2), np.zeros(2))
        assert loss(m, ds) == pytest.approx(0.0, abs=1e-24)
        g = gradients(m, ds).as_vector()
        assert np.allclose(g, 0.0, atol=1e-15)

    def test_unit_error(self):
        ds = make_windows(add_noise(_const_traj(), 0.0, 0), 3, 1)
        m = AttentionModel(np.zeros(2), 0.0, np.eye(2), np.zeros(2))
        # shift the prediction by one standardised unit in x
        shifted = AttentionModel(np.zeros(2), 0.0, np.eye(2), np.array([1.0, 0.0]))
        assert loss(shifted, ds) == pytest.approx(1.0, rel=1e-12)
        assert loss(m, ds) == 0.0

    @pytest.mark.parametrize("seed", [0, 1])
    def test_matches_naive_loop(self, seed, default_dataset):
        m = random_model(seed)
        assert loss(m, default_dataset) == pytest.approx(naive_loss(m, default_dataset), rel=1e-12, abs=1e-15)


def _const_traj():
    from lvattn.dynamics import Trajectory

    return Trajectory(0.0, 0.1, np.tile([3.0, 2.0], (20, 1)))


class TestGradients:
    @pytest.mark.parametrize("seed", range(5))
    def test_finite_differences(self, seed, small_dataset):
        m = random_model(100 + seed)
        g = gradients(m, small_dataset).as_vector()
        fd = fd_gradient(m, small_dataset)
        # score_bias (index 2) cancels inside the softmax: its gradient is identically zero
        assert abs(g[2]) < 1e-12 and abs(fd[2]) < 1e-9
        mask = np.arange(9) != 2
        rel = np.abs(g - fd)[mask] / np.maximum(np.abs(g), np.abs(fd))[mask]
        assert np.all(rel < 1e-4), rel

    def test_single_position_window_has_no_score_gradient(self, default_noisy):
        ds = make_windows(default_noisy, 1, 7)
        g = gradients(random_model(4), ds)
        assert np.all(g.score_weights == 0.0)
        assert g.score_bias == 0.0

    def test_backends_agree(self, small_dataset):
        if "compiled" not in kernels.available_backends():
            pytest.skip("compiled kernels not built")
        theta = random_model(7).as_vector()
        la, ga = kernels.load_backend("compiled").attention_loss_grad(small_dataset.inputs, small_dataset.targets, theta)
        lb, gb = kernels.load_backend("python").attention_loss_grad(small_dataset.inputs, small_dataset.targets, theta)
        assert la == pytest.approx(lb, rel=1e-12)
        assert np.allclose(ga, gb, rtol=1e-10, atol=1e-15)


class TestAdam:
    def test_zero_gradient_is_a_no_op(self):
        m = random_model(0)
        new, _ = adam_step(m, AdamState.zeros(), AttentionModel.from_vector(np.zeros(9)), TrainConfig(), 1)
        assert np.array_equal(new.as_vector(), m.as_vector())

    def test_first_scalar_step(self):
        cfg = TrainConfig(learning_rate=0.01)
        theta, state = adam_update(np.array([0.0]), AdamState.zeros(1), np.array([1.0]), cfg, 1)
        # m_hat = 1, v_hat = 1 after bias correction
        assert theta[0] == pytest.approx(-0.01 / (1 + 1e-8), rel=1e-14)
        assert state.m1[0] == pytest.approx(0.1)
        assert state.m2[0] == pytest.approx(0.001)

    def test_first_step_is_signed(self, rng):
        g = rng.normal(size=9) * np.logspace(-3, 2, 9)
        theta, _ = adam_update(np.zeros(9), AdamState.zeros(), g, TrainConfig(learning_rate=0.05), 1)
        assert np.array_equal(np.sign(theta), -np.sign(g))
        assert np.allclose(np.abs(theta), 0.05, rtol=1e-4)

    def test_step_index_must_be_positive(self):
        with pytest.raises(ValueError):
            adam_update(np.zeros(1), AdamState.zeros(1), np.ones(1), TrainConfig(), 0)

    @pytest.mark.parametrize("kw", [dict(learning_rate=0), dict(adam_beta1=1.0), dict(adam_beta2=0.0),
                                    dict(adam_epsilon=0), dict(epochs=-1)])
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            TrainConfig(**kw)


class TestTrain:
    def test_zero_epochs(self, default_dataset):
        m, hist = train(default_dataset, TrainConfig(epochs=0, seed=5))
        assert len(hist) == 0
        assert np.array_equal(m.as_vector(), init_model(5).as_vector())

    def test_converges(self, default_dataset):
        _, hist = train(default_dataset, TrainConfig())
        assert len(hist) == 300
        assert hist.losses[-1] < 0.5 * hist.losses[0]

    def test_deterministic(self, small_dataset):
        cfg = TrainConfig(epochs=50)
        m1, h1 = train(small_dataset, cfg)
        m2, h2 = train(small_dataset, cfg)
        assert h1.losses == h2.losses
        assert np.array_equal(m1.as_vector(), m2.as_vector())

    def test_divergence_reports_epoch(self, small_dataset):
        with pytest.raises(NumericError) as info:
            train(small_dataset, TrainConfig(learning_rate=1e300, epochs=5))
        assert info.value.epoch is not None


class TestProfile:
    def test_uniform_without_score_weights(self, default_noisy):
        m = AttentionModel(np.zeros(2), 0.3, np.eye(2), np.zeros(2))
        prof = attention_profile(m, default_noisy, 17, 1)
        assert len(prof) == len(default_noisy)
        assert np.allclose(prof.weights, 1 / len(default_noisy), rtol=1e-12)

    @pytest.mark.parametrize("stride", [1, 5, 17, 40])
    def test_normalised(self, default_noisy, stride):
        prof = attention_profile(random_model(9, 2.0), default_noisy, 17, stride)
        assert np.all(prof.weights >= 0)
        assert prof.weights.sum() == pytest.approx(1.0, abs=1e-9)

    def test_matches_explicit_aggregation(self, default_noisy):
        m = random_model(11, 2.0)
        ds = make_windows(default_noisy, 5, 2)
        rows = attention_rows(m, ds.inputs)
        acc = np.zeros(len(default_noisy))
        cnt = np.zeros(len(default_noisy))
        for start, row in zip(ds.starts, rows):
            for j, a in enumerate(row):
                acc[start + j] += a
                cnt[start + j] += 1
        expected = np.where(cnt > 0, acc / np.maximum(cnt, 1), 0.0)
        prof = attention_profile(m, default_noisy, 5, 2)
        assert np.allclose(prof.weights, expected / expected.sum(), rtol=1e-12)
