"""Loss evaluation and parameter-shift gradients.

For gates exp(-i*theta*G) with a Pauli generator the derivative is exactly
f(theta + pi/4 e_j) - f(theta - pi/4 e_j); no step-size error is involved,
which the finite-difference oracle here exists to confirm.

Exact-mode gradients run a fused kernel that sweeps the circuit once and
branches the two shifted copies at each parameterized gate (prefix reuse).
Shot-mode gradients evaluate each of the 2P shifted circuits with fresh,
independent measurement draws from the stream (master_seed, param_index,
sign), so results do not depend on evaluation order or common random
numbers.  Prefix reuse produces bit-identical states to running each
shifted circuit from scratch, because the applied op sequence is identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .circuits import check_theta, run
from .observables import Hamiltonian, PauliString, expectation_hamiltonian
from .rng import derive_rng


@dataclass(frozen=True)
class ShotMode:
    """Finite-measurement evaluation: `shots` per Pauli term, streams
    derived from `seed`."""
    shots: int
    seed: int = 0


class LossEvaluator:
    """f(theta) = <O> after running `circuit` on `input_state`."""

    def __init__(self, circuit, observable, input_state, mode="exact"):
        if isinstance(observable, PauliString):
            observable = Hamiltonian([(1.0, observable)])
        if not isinstance(observable, Hamiltonian):
            raise TypeError(f"observable must be PauliString or Hamiltonian, "
                            f"got {type(observable).__name__}")
        if observable.num_qubits != circuit.num_qubits:
            raise ValueError(f"observable register ({observable.num_qubits}) does not "
                             f"match circuit ({circuit.num_qubits})")
        if input_state.num_qubits != circuit.num_qubits:
            raise ValueError(f"input register ({input_state.num_qubits}) does not "
                             f"match circuit ({circuit.num_qubits})")
        if mode != "exact" and not isinstance(mode, ShotMode):
            raise ValueError(f"mode must be 'exact' or ShotMode, got {mode!r}")
        self.circuit = circuit
        self.observable = observable
        self.input_state = input_state
        self.mode = mode

    @property
    def exact(self):
        return self.mode == "exact"


def evaluate(e, theta, rng=None):
    """f(theta); in shot mode, draws come from `rng` if given, else from
    the mode's seed (making repeated calls identical by design)."""
    out = run(e.circuit, theta, e.input_state)
    if e.exact:
        return expectation_hamiltonian(out, e.observable)
    rng = rng if rng is not None else derive_rng(e.mode.seed)
    return expectation_hamiltonian(out, e.observable, shots=e.mode.shots, rng=rng)


def grad_and_value(e, theta):
    """Exact-mode (gradient, f(theta)) from one fused prefix-reuse sweep."""
    if not e.exact:
        raise ValueError("grad_and_value is exact-mode only")
    theta = check_theta(e.circuit, theta).copy()
    kinds, q0, q1, axes, slots, fixed = e.circuit.compiled
    xm, zm, ph, co = e.observable.compiled()
    if len(e.observable) == 0:
        return np.zeros(e.circuit.param_count), 0.0
    grad, psi = _k.shift_grad(e.input_state.amplitudes, kinds, q0, q1, axes,
                              slots, fixed, theta, xm, zm, ph, co,
                              e.circuit.param_count)
    return grad, float(_k.ham_expect(psi, xm, zm, ph, co))


def param_shift_grad(e, theta, master_seed=None):
    """Gradient via the exact +-pi/4 shift rule.

    Shot mode evaluates the 2P shifted circuits independently; evaluation j
    with sign s in {0: plus, 1: minus} uses the stream (master_seed, j, s),
    with master_seed defaulting to the mode's seed.
    """
    if e.exact:
        grad, _ = grad_and_value(e, theta)
        return grad
    theta = check_theta(e.circuit, theta).copy()
    kinds, q0, q1, axes, slots, fixed = e.circuit.compiled
    nops = len(kinds)
    seed = e.mode.seed if master_seed is None else master_seed
    grad = np.zeros(e.circuit.param_count)
    prefix = e.input_state.copy()
    for i in range(nops):
        s = int(slots[i])
        if kinds[i] == _k.KIND_ROT and s >= 0:
            save = theta[s]
            fs = []
            for sign, offset in ((0, _k.SHIFT), (1, -_k.SHIFT)):
                branch = prefix.copy()
                theta[s] = save + offset
                _k.run_window(branch.amplitudes, kinds, q0, q1, axes, slots,
                              fixed, theta, i, nops)
                fs.append(expectation_hamiltonian(
                    branch, e.observable, shots=e.mode.shots,
                    rng=derive_rng(seed, s, sign)))
            theta[s] = save
            grad[s] = fs[0] - fs[1]
        _k.run_window(prefix.amplitudes, kinds, q0, q1, axes, slots, fixed,
                      theta, i, i + 1)
    return grad


def finite_diff_grad(e, theta, h=1e-4):
    """Central-difference oracle (f(theta+h) - f(theta-h)) / 2h, exact mode only."""
    if not e.exact:
        raise ValueError("finite differences require an exact-mode evaluator")
    theta = check_theta(e.circuit, theta).copy()
    grad = np.zeros(e.circuit.param_count)
    for j in range(e.circuit.param_count):
        save = theta[j]
        theta[j] = save + h
        fp = evaluate(e, theta)
        theta[j] = save - h
        fm = evaluate(e, theta)
        theta[j] = save
        grad[j] = (fp - fm) / (2.0 * h)
    return grad


def grad_norm_sq(g):
    """Squared l2-norm; experiments report its square root."""
    g = np.asarray(g, dtype=np.float64)
    return float(np.dot(g, g))
