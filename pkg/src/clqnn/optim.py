"""Plain SGD and Adam plus a deterministic training loop.

Steps are pure functions: `sgd_step` is stateless and `adam_step` maps an
explicit moment-state to its successor, so a training trace is a pure
function of the starting point, the gradient sequence, and the
hyperparameters.  The loop records telemetry at the pre-step point of each
iteration (row t describes theta_t, then the step is taken), aborts on the
first non-finite loss or gradient with the offending row marked diverged,
and draws every random stream it needs from the config seed so identical
configs give identical traces.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .gradients import LossEvaluator, evaluate, grad_and_value, param_shift_grad
from .rng import derive_rng, derive_seed

STREAM_INIT = 0
STREAM_GRAD = 1
STREAM_LOSS = 2
STREAM_BATCH = 3


def sgd_step(theta, grad, lr):
    """theta - lr * grad; no state, so halving lr twice is not one step."""
    if lr < 0:
        raise ValueError(f"lr must be non-negative, got {lr}")
    return np.asarray(theta, dtype=np.float64) - lr * np.asarray(grad, dtype=np.float64)


@dataclass(frozen=True)
class AdamState:
    """Bias-corrected moment accumulators; t counts completed steps."""
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: np.ndarray | None = None
    v: np.ndarray | None = None
    t: int = 0

    def __post_init__(self):
        if self.lr < 0:
            raise ValueError(f"lr must be non-negative, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if self.t < 0:
            raise ValueError("step counter must be >= 0")


def adam_step(state, theta, grad):
    """One bias-corrected Adam update; returns (state', theta')."""
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    m = state.m if state.m is not None else np.zeros_like(theta)
    v = state.v if state.v is not None else np.zeros_like(theta)
    if m.shape != theta.shape or v.shape != theta.shape:
        raise ValueError("moment vectors must match theta length")
    t = state.t + 1
    m = state.beta1 * m + (1.0 - state.beta1) * grad
    v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    theta_new = theta - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return replace(state, m=m, v=v, t=t), theta_new


@dataclass(frozen=True)
class TrainConfig:
    iterations: int
    optimizer: str
    lr: float
    seed: int = 0
    shots_per_term: int | None = None
    batch_size: int | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"optimizer must be 'sgd' or 'adam', got {self.optimizer!r}")
        if self.lr < 0:
            raise ValueError(f"lr must be non-negative, got {self.lr}")
        if self.shots_per_term is not None and self.shots_per_term < 1:
            raise ValueError("shots_per_term must be >= 1")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class RunRecord:
    iteration: int
    loss: float
    grad_norm: float
    test_error: float | None = None
    diverged: bool = False


CSV_COLUMNS = ("iteration", "loss", "grad_norm", "test_error")


def records_to_csv(records):
    """CSV text with blank test_error cells where the run tracked none."""
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        test = "" if r.test_error is None else repr(float(r.test_error))
        lines.append(f"{r.iteration},{repr(float(r.loss))},{repr(float(r.grad_norm))},{test}")
    return "\n".join(lines) + "\n"


class EvaluatorProblem:
    """Adapts a LossEvaluator to the training-problem protocol.

    Shot-mode gradients and the recorded loss draw fresh streams per
    iteration, derived from the run seed, so the trace does not depend on
    how evaluations are scheduled.
    """

    def __init__(self, evaluator, seed):
        self.evaluator = evaluator
        self.seed = int(seed)

    @property
    def param_count(self):
        return self.evaluator.circuit.param_count

    def loss_and_grad(self, theta, iteration):
        if self.evaluator.mode == "exact":
            grad, loss = grad_and_value(self.evaluator, theta)
            return loss, grad
        grad = param_shift_grad(self.evaluator, theta,
                                master_seed=derive_seed(self.seed, STREAM_GRAD, iteration))
        loss = evaluate(self.evaluator, theta,
                        rng=derive_rng(self.seed, STREAM_LOSS, iteration))
        return loss, grad

    def test_error(self, theta, iteration):
        return None


def train(problem, config, theta0=None):
    """Run the loop; returns one RunRecord per completed iteration.

    `problem` is either a LossEvaluator or any object with `param_count`,
    `loss_and_grad(theta, iteration) -> (loss, grad)`, and optionally
    `test_error(theta, iteration)`.  theta0 defaults to a uniform draw
    from the config seed.
    """
    from .circuits import init_uniform

    if isinstance(problem, LossEvaluator):
        problem = EvaluatorProblem(problem, config.seed)
    if theta0 is None:
        theta = init_uniform(problem.param_count, derive_rng(config.seed, STREAM_INIT))
    else:
        theta = np.asarray(theta0, dtype=np.float64).copy()
    if config.optimizer == "adam":
        state = AdamState(lr=config.lr)
    else:
        state = None
    test_fn = getattr(problem, "test_error", None)
    records = []
    for t in range(config.iterations):
        loss, grad = problem.loss_and_grad(theta, t)
        grad = np.asarray(grad, dtype=np.float64)
        grad_norm = float(np.sqrt(np.dot(grad, grad)))
        test = test_fn(theta, t) if test_fn is not None else None
        finite = np.isfinite(loss) and np.isfinite(grad_norm)
        records.append(RunRecord(t, float(loss), grad_norm,
                                 None if test is None else float(test),
                                 diverged=not finite))
        if not finite:
            break
        if state is None:
            theta = sgd_step(theta, grad, config.lr)
        else:
            state, theta = adam_step(state, theta, grad)
    return records
