"""Binary classification of angle-embedded tabular wine data.

Rows of the classic 13-feature cultivar table are embedded one feature per
qubit as product states R_Y(x_j)|0>, and a parameterized circuit is
trained on the l1 deviation between <Z_0> and the +-1 class label.  The
loss is non-differentiable where prediction equals label; training uses
the subgradient with sign(0) = 0.  Reported classification error is the
misclassification fraction under the sign of the exact expectation, with
an exactly-zero expectation counted as an error since it refuses to pick
a class; by construction that makes the error invariant under any strictly
positive rescaling of the predictor.

Features are min-max scaled to [0, pi] using training-set statistics (raw
magnitudes span hundreds, which would wrap the embedding angles); test
features use the same affine map and clamp to [0, pi].
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..circuits import (
    HardwareEfficient,
    build_cl_qnn,
    build_he_ansatz,
    build_random_qnn,
    gate_budget,
)
from ..gradients import (
    LossEvaluator,
    ShotMode,
    evaluate,
    grad_and_value,
    param_shift_grad,
)
from ..observables import PauliString
from ..optim import STREAM_BATCH, STREAM_GRAD, STREAM_LOSS, TrainConfig, train
from ..rng import as_rng, derive_rng, derive_seed
from ..states import PureState

STRUCT_STREAM = 4

TRAIN_PER_CLASS = 29
TEST_PER_CLASS = 29
PER_CLASS = TRAIN_PER_CLASS + TEST_PER_CLASS


class DataError(Exception):
    """Unusable input data: malformed rows or not enough class members."""


@dataclass(frozen=True)
class WineDataset:
    """Balanced train/test splits, features scaled to [0, pi], labels +-1."""
    train_features: np.ndarray
    train_labels: np.ndarray
    test_features: np.ndarray
    test_labels: np.ndarray
    class_pair: tuple

    @property
    def num_features(self):
        return self.train_features.shape[1]


def _parse_rows(lines):
    rows = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != 14:
            raise DataError(f"line {lineno}: expected 14 comma-separated columns, "
                            f"got {len(cells)}")
        try:
            label = int(cells[0])
            features = [float(c) for c in cells[1:]]
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
        rows.append((label, features))
    if not rows:
        raise DataError("no data rows found")
    return rows


def _resolve_path(path):
    if path is not None:
        return str(path), None
    env = os.environ.get("WINE_DATA")
    if env:
        return env, None
    return None, resources.files("clqnn").joinpath("data/wine.data")


def load_wine(path=None, class_pair=(1, 2), seed=0):
    """Load, select two classes, split 29+29 per class, and scale.

    The file is resolved from `path`, then the WINE_DATA environment
    variable, then the bundled copy.  Rows are "label,f1,...,f13" with an
    integer class label.  The first class of `class_pair` maps to +1, the
    second to -1; each class is shuffled by a stream derived from `seed`
    before the split, so the split is a pure function of (file, pair, seed).
    """
    class_pair = (int(class_pair[0]), int(class_pair[1]))
    if class_pair[0] == class_pair[1]:
        raise ValueError("class_pair must name two distinct classes")
    fs_path, bundled = _resolve_path(path)
    try:
        if bundled is not None:
            text = bundled.read_text()
        else:
            with open(fs_path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read wine data: {exc}") from None
    rows = _parse_rows(text.splitlines())
    train_idx, test_idx = [], []
    for which, label in enumerate(class_pair):
        members = [i for i, (lab, _) in enumerate(rows) if lab == label]
        if len(members) < PER_CLASS:
            raise DataError(f"class {label} has {len(members)} instances; "
                            f"{PER_CLASS} needed for a balanced 29+29 split")
        order = derive_rng(seed, which).permutation(len(members))
        picked = [members[j] for j in order[:PER_CLASS]]
        train_idx.extend(picked[:TRAIN_PER_CLASS])
        test_idx.extend(picked[TRAIN_PER_CLASS:])

    def _gather(idx):
        x = np.array([rows[i][1] for i in idx], dtype=np.float64)
        y = np.array([1 if rows[i][0] == class_pair[0] else -1 for i in idx],
                     dtype=np.int64)
        return x, y

    train_x, train_y = _gather(train_idx)
    test_x, test_y = _gather(test_idx)
    lo = train_x.min(axis=0)
    span = train_x.max(axis=0) - lo
    span[span == 0.0] = 1.0
    train_x = (train_x - lo) / span * np.pi
    test_x = np.clip((test_x - lo) / span * np.pi, 0.0, np.pi)
    return WineDataset(train_x, train_y, test_x, test_y, class_pair)


def qubit_embed(x):
    """Product state R_Y(x_j)|0> on one qubit per feature."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("qubit_embed expects a non-empty feature vector")
    state = PureState.zero(x.size)
    for j, angle in enumerate(x):
        state.apply_rotation("y", angle, j)
    return state


def _predictor(circuit):
    return PauliString.single(circuit.num_qubits, 0, 3)


def _as_state(x, n):
    if isinstance(x, PureState):
        return x
    state = qubit_embed(x)
    if state.num_qubits != n:
        raise ValueError(f"sample has {state.num_qubits} features, circuit has {n} qubits")
    return state


def _master(rng):
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    # live generators cannot be split reproducibly per sample; draw one
    # child seed and derive per-sample streams from it
    return int(as_rng(rng).integers(2 ** 63))


def qml_loss(circuit, theta, batch, shots=None, rng=0):
    """Mean |<Z_0> - y| over (features, label) pairs; shot-estimated when
    `shots` is given, exact otherwise.  Sample i draws from the stream
    (rng, i, 0)."""
    batch = list(batch)
    if not batch:
        raise ValueError("batch must be non-empty")
    sigma = _predictor(circuit)
    seed = _master(rng) if shots is not None else 0
    total = 0.0
    for i, (x, y) in enumerate(batch):
        state = _as_state(x, circuit.num_qubits)
        mode = "exact" if shots is None else ShotMode(shots)
        e = LossEvaluator(circuit, sigma, state, mode=mode)
        kwargs = {} if shots is None else {"rng": derive_rng(seed, i, 0)}
        total += abs(evaluate(e, theta, **kwargs) - float(y))
    return total / len(batch)


def qml_grad(circuit, theta, batch, shots=None, rng=0):
    """Subgradient of qml_loss: mean of sign(<Z_0> - y) * d<Z_0>/dtheta.

    The sign is taken on a fresh estimate (stream (rng, i, 1)); sample i's
    parameter shifts draw from streams derived from (rng, i, 0).  Exact
    mode computes both from one fused sweep.
    """
    batch = list(batch)
    if not batch:
        raise ValueError("batch must be non-empty")
    sigma = _predictor(circuit)
    seed = _master(rng) if shots is not None else 0
    grad = np.zeros(circuit.param_count)
    for i, (x, y) in enumerate(batch):
        state = _as_state(x, circuit.num_qubits)
        if shots is None:
            e = LossEvaluator(circuit, sigma, state)
            g, f = grad_and_value(e, theta)
            grad += np.sign(f - float(y)) * g
        else:
            e = LossEvaluator(circuit, sigma, state, mode=ShotMode(shots))
            g = param_shift_grad(e, theta, master_seed=derive_seed(seed, i, 0))
            f = evaluate(e, theta, rng=derive_rng(seed, i, 1))
            grad += np.sign(f - float(y)) * g
    return grad / len(batch)


def error_rate(values, labels):
    """Fraction of sign mismatches; a zero value counts as an error."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels)
    if values.shape != labels.shape:
        raise ValueError("values and labels must have matching shapes")
    return float(np.mean(np.sign(values) != labels))


def classification_error(circuit, theta, features, labels):
    """Misclassification fraction of sign(<Z_0>) against +-1 labels,
    with exact expectations."""
    sigma = _predictor(circuit)
    values = []
    for x in features:
        e = LossEvaluator(circuit, sigma, _as_state(x, circuit.num_qubits))
        values.append(evaluate(e, theta))
    return error_rate(values, labels)


@dataclass(frozen=True)
class WineConfig:
    iterations: int = 200
    optimizer: str = "adam"
    lr: float = 0.01
    batch_size: int = 8
    shots: int = 100
    seed: int = 0
    class_pair: tuple = (1, 2)
    data_path: str | None = None
    num_blocks: int = 2
    inner_layers: int = 5
    he_layers: int = 10


@dataclass(frozen=True)
class WineResult:
    records: tuple
    ansatz: str
    budget: object
    train_size: int
    test_size: int

    @property
    def final_train_loss(self):
        return self.records[-1].loss

    @property
    def final_test_error(self):
        return self.records[-1].test_error


class _WineProblem:
    """Training protocol over a fixed dataset with per-iteration streams.

    Embedded input states are prepared once; iteration t draws its batch
    from (seed, batch-stream, t), its gradient shots from streams under
    (seed, grad-stream, t), and the recorded full-train-set loss from
    (seed, loss-stream, t), so traces are scheduling-independent.
    """

    def __init__(self, circuit, dataset, config):
        self.circuit = circuit
        self.config = config
        self.train_states = [qubit_embed(x) for x in dataset.train_features]
        self.train_labels = dataset.train_labels
        self.test_states = [qubit_embed(x) for x in dataset.test_features]
        self.test_labels = dataset.test_labels

    @property
    def param_count(self):
        return self.circuit.param_count

    def loss_and_grad(self, theta, iteration):
        cfg = self.config
        idx = derive_rng(cfg.seed, STREAM_BATCH, iteration).choice(
            len(self.train_states), size=cfg.batch_size, replace=False)
        batch = [(self.train_states[i], self.train_labels[i]) for i in idx]
        grad = qml_grad(self.circuit, theta, batch, shots=cfg.shots,
                        rng=derive_seed(cfg.seed, STREAM_GRAD, iteration))
        full = list(zip(self.train_states, self.train_labels))
        loss = qml_loss(self.circuit, theta, full, shots=cfg.shots,
                        rng=derive_seed(cfg.seed, STREAM_LOSS, iteration))
        return loss, grad

    def test_error(self, theta, iteration):
        return classification_error(self.circuit, theta,
                                    self.test_states, self.test_labels)


def build_wine_circuit(ansatz, num_features, config):
    if ansatz == "cl":
        return build_cl_qnn(num_features, 1, config.num_blocks,
                            HardwareEfficient(config.inner_layers))
    if ansatz == "he":
        return build_he_ansatz(num_features, config.he_layers)
    if ansatz == "random":
        cl = build_cl_qnn(num_features, 1, config.num_blocks,
                          HardwareEfficient(config.inner_layers))
        return build_random_qnn(num_features, gate_budget(cl),
                                derive_rng(config.seed, STRUCT_STREAM))
    raise ValueError(f"ansatz must be 'cl', 'he', or 'random', got {ansatz!r}")


def classification_experiment(ansatz, config, dataset=None):
    """Train one ansatz on the wine split; records include training loss
    (full train set, shot-estimated), gradient norm, and exact test error
    per iteration."""
    if dataset is None:
        dataset = load_wine(config.data_path, config.class_pair, config.seed)
    if config.batch_size > len(dataset.train_labels):
        raise ValueError(f"batch_size {config.batch_size} exceeds the "
                         f"{len(dataset.train_labels)}-sample training split")
    circuit = build_wine_circuit(ansatz, dataset.num_features, config)
    train_cfg = TrainConfig(iterations=config.iterations, optimizer=config.optimizer,
                            lr=config.lr, seed=config.seed,
                            shots_per_term=config.shots, batch_size=config.batch_size)
    problem = _WineProblem(circuit, dataset, config)
    records = train(problem, train_cfg)
    return WineResult(tuple(records), ansatz, gate_budget(circuit),
                      len(dataset.train_labels), len(dataset.test_labels))
