"""Optimizers and the training loop."""

from __future__ import annotations

import numpy as np
import pytest

from clqnn import (
    AdamState,
    HardwareEfficient,
    LossEvaluator,
    PauliString,
    PureState,
    RunRecord,
    TrainConfig,
    adam_step,
    build_cl_qnn,
    evaluate,
    grad_and_value,
    records_to_csv,
    sgd_step,
    train,
)
from clqnn.circuits import init_uniform
from clqnn.optim import STREAM_INIT
from clqnn.rng import derive_rng

from oracles import adam_trace_oracle


class Quadratic:
    """loss = |theta|^2 / 2, gradient = theta."""

    param_count = 4

    def loss_and_grad(self, theta, iteration):
        return float(np.dot(theta, theta)) / 2.0, np.array(theta, dtype=np.float64)


def test_sgd_step():
    theta = sgd_step([1.0, -2.0], [0.5, 0.5], lr=0.1)
    assert theta == pytest.approx([0.95, -2.05])
    assert np.array_equal(sgd_step([1.0], [9.0], lr=0.0), [1.0])
    with pytest.raises(ValueError):
        sgd_step([1.0], [1.0], lr=-0.1)


def test_adam_matches_the_textbook_update():
    rng = np.random.default_rng(21)
    theta0 = rng.standard_normal(5)
    grads = [rng.standard_normal(5) for _ in range(5)]
    state = AdamState(lr=0.05)
    theta = theta0.copy()
    for step, expected in zip(grads, adam_trace_oracle(theta0, grads, lr=0.05)):
        state, theta = adam_step(state, theta, step)
        assert theta == pytest.approx(expected, abs=1e-12)
    assert state.t == 5


def test_adam_first_step_moves_by_roughly_lr():
    # bias correction makes the first update lr * g / (|g| + eps)
    state, theta = adam_step(AdamState(lr=0.3), np.zeros(3), np.array([5.0, -0.1, 2.0]))
    assert theta == pytest.approx([-0.3, 0.3, -0.3], rel=1e-6)


def test_adam_step_size_is_bounded_by_lr_for_steady_gradients():
    # with a constant gradient the bias-corrected ratio is g / (|g| + eps),
    # so every step has magnitude just under lr regardless of |g|
    rng = np.random.default_rng(2)
    state = AdamState(lr=0.02)
    theta = rng.standard_normal(6)
    grad = np.array([100.0, -3.0, 0.5, -0.01, 7.0, -250.0])
    for _ in range(50):
        state, new = adam_step(state, theta, grad)
        steps = np.abs(new - theta)
        assert steps.max() <= 0.02 * (1.0 + 1e-6)
        assert steps.min() >= 0.02 * 0.99
        theta = new


def test_adam_state_validation():
    with pytest.raises(ValueError):
        AdamState(lr=-1.0)
    with pytest.raises(ValueError):
        AdamState(lr=0.1, beta1=1.0)
    with pytest.raises(ValueError):
        AdamState(lr=0.1, beta2=-0.1)
    with pytest.raises(ValueError):
        AdamState(lr=0.1, t=-1)
    with pytest.raises(ValueError):
        adam_step(AdamState(lr=0.1, m=np.zeros(2), v=np.zeros(2)), np.zeros(3), np.zeros(3))


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(iterations=0, optimizer="sgd", lr=0.1)
    with pytest.raises(ValueError):
        TrainConfig(iterations=1, optimizer="momentum", lr=0.1)
    with pytest.raises(ValueError):
        TrainConfig(iterations=1, optimizer="sgd", lr=-0.1)
    with pytest.raises(ValueError):
        TrainConfig(iterations=1, optimizer="sgd", lr=0.1, shots_per_term=0)
    with pytest.raises(ValueError):
        TrainConfig(iterations=1, optimizer="sgd", lr=0.1, batch_size=0)


def test_sgd_descends_a_quadratic():
    records = train(Quadratic(), TrainConfig(iterations=30, optimizer="sgd", lr=0.2, seed=1))
    assert len(records) == 30
    assert records[-1].loss < records[0].loss * 1e-2
    assert [r.iteration for r in records] == list(range(30))


def test_adam_descends_a_quadratic():
    records = train(Quadratic(), TrainConfig(iterations=60, optimizer="adam", lr=0.2, seed=1))
    assert records[-1].loss < records[0].loss * 0.1


def test_zero_learning_rate_freezes_the_trace():
    for optimizer in ("sgd", "adam"):
        records = train(Quadratic(),
                        TrainConfig(iterations=5, optimizer=optimizer, lr=0.0, seed=3))
        assert len({r.loss for r in records}) == 1


def test_records_snapshot_the_pre_step_point():
    theta0 = np.array([2.0, 0.0, 0.0, 0.0])
    records = train(Quadratic(), TrainConfig(iterations=3, optimizer="sgd", lr=0.5, seed=0),
                    theta0=theta0)
    assert records[0].loss == pytest.approx(2.0)
    assert records[0].grad_norm == pytest.approx(2.0)
    # lr 0.5 halves theta each step, quartering the loss
    assert records[1].loss == pytest.approx(0.5)
    assert records[2].loss == pytest.approx(0.125)


def test_default_initialization_comes_from_the_seed_stream():
    probe = {}

    class Capture:
        param_count = 3

        def loss_and_grad(self, theta, iteration):
            probe.setdefault("theta0", np.array(theta))
            return 0.0, np.zeros(3)

    train(Capture(), TrainConfig(iterations=1, optimizer="sgd", lr=0.1, seed=11))
    expected = init_uniform(3, derive_rng(11, STREAM_INIT))
    assert np.array_equal(probe["theta0"], expected)


def test_divergence_aborts_the_run_and_flags_the_row():
    class Explodes:
        param_count = 2

        def loss_and_grad(self, theta, iteration):
            if iteration == 2:
                return float("nan"), np.zeros(2)
            return 1.0, np.ones(2)

    records = train(Explodes(), TrainConfig(iterations=10, optimizer="sgd", lr=0.1, seed=0))
    assert len(records) == 3
    assert records[-1].diverged is True
    assert all(r.diverged is False for r in records[:-1])


def test_train_accepts_a_loss_evaluator_directly():
    c = build_cl_qnn(3, 1, 1, HardwareEfficient(1))
    e = LossEvaluator(c, PauliString.from_text("ZII"), PureState.zero(3))
    cfg = TrainConfig(iterations=4, optimizer="sgd", lr=0.1, seed=5)
    records = train(e, cfg)
    assert len(records) == 4
    theta0 = init_uniform(c.param_count, derive_rng(5, STREAM_INIT))
    grad, value = grad_and_value(e, theta0)
    assert records[0].loss == pytest.approx(value, abs=1e-12)
    assert records[0].grad_norm == pytest.approx(float(np.linalg.norm(grad)), abs=1e-12)
    assert records[0].test_error is None


def test_exact_mode_training_reduces_the_loss():
    c = build_cl_qnn(3, 1, 1, HardwareEfficient(1))
    e = LossEvaluator(c, PauliString.from_text("ZII"), PureState.zero(3))
    records = train(e, TrainConfig(iterations=40, optimizer="adam", lr=0.1, seed=2))
    assert records[-1].loss < records[0].loss
    # the loss is an expectation of a single Pauli, so it stays in [-1, 1]
    assert all(-1.0 - 1e-9 <= r.loss <= 1.0 + 1e-9 for r in records)


def test_training_trace_is_deterministic():
    c = build_cl_qnn(3, 1, 1, HardwareEfficient(1))
    cfg = TrainConfig(iterations=5, optimizer="adam", lr=0.05, seed=9)
    a = train(LossEvaluator(c, PauliString.from_text("ZII"), PureState.zero(3)), cfg)
    b = train(LossEvaluator(c, PauliString.from_text("ZII"), PureState.zero(3)), cfg)
    assert a == b


def test_theta0_override_is_respected():
    records = train(Quadratic(), TrainConfig(iterations=1, optimizer="sgd", lr=0.1, seed=0),
                    theta0=np.zeros(4))
    assert records[0].loss == 0.0


def test_records_to_csv_formatting():
    rows = [RunRecord(0, 1.5, 0.25, None), RunRecord(1, -0.125, 0.0, 0.5)]
    text = records_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "iteration,loss,grad_norm,test_error"
    assert lines[1] == "0,1.5,0.25,"
    assert lines[2] == "1,-0.125,0.0,0.5"
    assert text.endswith("\n")
