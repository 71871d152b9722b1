"""Scaling scan of the single-qubit-observable toy model.

For each qubit count and ansatz the scan draws fresh parameter vectors,
evaluates f = <Z_0> from the all-zeros state, and aggregates f^2 and (in
noiseless mode) the exact squared gradient norm.  The random ansatz is
budget-matched to the controlled-layer circuit at the same width so the
comparison is gate-for-gate fair, and its structure is redrawn each round.
Noisy mode runs the density-matrix backend with a depolarizing channel
after every layer and reports squared losses only; shifted-circuit
gradients under noise cost 2P density evolutions per round and add nothing
to the statements being checked here.

Every round draws from a stream derived from (seed, ansatz, n, round), so
rows do not depend on scan order or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuits import (
    HardwareEfficient,
    build_cl_qnn,
    build_he_ansatz,
    build_random_qnn,
    gate_budget,
    init_haar_local,
    init_uniform,
)
from ..density import MixedState, expectation_mixed, run_noisy
from ..gradients import LossEvaluator, evaluate, grad_and_value
from ..observables import PauliString
from ..parallel import parallel_map
from ..rng import derive_rng
from ..states import MAX_QUBITS, PureState

ANSATZ_CODES = {"cl": 0, "he": 1, "random": 2}
MAX_NOISY_QUBITS = 10

STRUCT_STREAM = 0
INIT_STREAM = 1


@dataclass(frozen=True)
class ToyScanConfig:
    n_values: tuple
    ansatzes: tuple = ("cl", "he", "random")
    rounds: int = 5
    noise_q: float | None = None
    init: str = "uniform"
    seed: int = 0
    jobs: int = 1
    compute_grad: bool = True
    num_blocks: int = 2
    s: int = 1
    inner_layers: int = 5
    he_layers: int = 10

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "ansatzes", tuple(self.ansatzes))
        if not self.n_values:
            raise ValueError("n_values must be non-empty")
        if min(self.n_values) < 3:
            raise ValueError("toy scan needs N >= 3 (controlled layer plus inner register)")
        limit = MAX_NOISY_QUBITS if self.noise_q is not None else MAX_QUBITS
        if max(self.n_values) > limit:
            kind = "noisy" if self.noise_q is not None else "pure"
            raise ValueError(f"N = {max(self.n_values)} exceeds the {kind} backend "
                             f"limit of {limit} qubits")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        unknown = set(self.ansatzes) - set(ANSATZ_CODES)
        if unknown:
            raise ValueError(f"unknown ansatz names: {sorted(unknown)}")
        if self.noise_q is not None and not 0.0 <= self.noise_q <= 1.0:
            raise ValueError(f"noise_q must lie in [0, 1], got {self.noise_q}")
        if self.init not in ("uniform", "haar-local"):
            raise ValueError(f"init must be 'uniform' or 'haar-local', got {self.init!r}")


@dataclass(frozen=True)
class ScanRow:
    """Aggregates for one (n, ansatz) cell; gradient fields are None in
    noisy mode."""
    n: int
    ansatz: str
    rounds: int
    mean_f_sq: float
    stderr_f_sq: float
    median_f_sq: float
    mean_grad_sq: float | None
    stderr_grad_sq: float | None
    median_grad_sq: float | None


CSV_COLUMNS = ("n", "ansatz", "rounds", "mean_f_sq", "stderr_f_sq", "median_f_sq",
               "mean_grad_sq", "stderr_grad_sq", "median_grad_sq")


def rows_to_csv(rows):
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        cells = [str(r.n), r.ansatz, str(r.rounds)]
        for v in (r.mean_f_sq, r.stderr_f_sq, r.median_f_sq,
                  r.mean_grad_sq, r.stderr_grad_sq, r.median_grad_sq):
            cells.append("" if v is None else repr(float(v)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def toy_loss(circuit, theta, num_qubits=None):
    """<Z_0> after running the circuit from |0...0>."""
    n = circuit.num_qubits if num_qubits is None else int(num_qubits)
    if n != circuit.num_qubits:
        raise ValueError(f"num_qubits {n} does not match circuit ({circuit.num_qubits})")
    e = LossEvaluator(circuit, PauliString.single(n, 0, 3), PureState.zero(n))
    return evaluate(e, theta)


def build_ansatz(name, n, config, rng=None):
    """Construct one scan circuit; `rng` feeds the random ansatz only."""
    if name == "cl":
        return build_cl_qnn(n, config.s, config.num_blocks,
                            HardwareEfficient(config.inner_layers))
    if name == "he":
        return build_he_ansatz(n, config.he_layers)
    if name == "random":
        budget = gate_budget(build_ansatz("cl", n, config))
        return build_random_qnn(n, budget, rng)
    raise ValueError(f"unknown ansatz {name!r}")


def _draw_theta(circuit, config, rng):
    if config.init == "haar-local":
        return init_haar_local(circuit, rng)
    return init_uniform(circuit.param_count, rng)


def _scan_cell(args):
    """All rounds for one (ansatz, n) cell; returns a ScanRow."""
    name, n, config = args
    code = ANSATZ_CODES[name]
    want_grad = config.noise_q is None and config.compute_grad
    f_sq = np.empty(config.rounds)
    g_sq = np.empty(config.rounds) if want_grad else None
    sigma = PauliString.single(n, 0, 3)
    fixed_circuit = None if name == "random" else build_ansatz(name, n, config)
    for r in range(config.rounds):
        circuit = fixed_circuit
        if circuit is None:
            circuit = build_ansatz(name, n, config,
                                   derive_rng(config.seed, code, n, r, STRUCT_STREAM))
        theta = _draw_theta(circuit, config,
                            derive_rng(config.seed, code, n, r, INIT_STREAM))
        if want_grad:
            e = LossEvaluator(circuit, sigma, PureState.zero(n))
            grad, f = grad_and_value(e, theta)
            f_sq[r] = f * f
            g_sq[r] = float(np.dot(grad, grad))
        elif config.noise_q is None:
            e = LossEvaluator(circuit, sigma, PureState.zero(n))
            f = evaluate(e, theta)
            f_sq[r] = f * f
        else:
            rho = run_noisy(circuit, theta, config.noise_q, MixedState.zero(n))
            f = expectation_mixed(rho, sigma)
            f_sq[r] = f * f
    def _stats(v):
        stderr = float(v.std(ddof=1) / np.sqrt(len(v))) if len(v) > 1 else 0.0
        return float(v.mean()), stderr, float(np.median(v))
    mf, sf, df = _stats(f_sq)
    if g_sq is None:
        return ScanRow(n, name, config.rounds, mf, sf, df, None, None, None)
    mg, sg, dg = _stats(g_sq)
    return ScanRow(n, name, config.rounds, mf, sf, df, mg, sg, dg)


def toy_scan(config):
    """One ScanRow per (n, ansatz), ordered by n then by the config's
    ansatz order."""
    tasks = [(name, n, config) for n in config.n_values for name in config.ansatzes]
    return parallel_map(_scan_cell, tasks, jobs=config.jobs)
