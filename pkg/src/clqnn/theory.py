"""Numerical verification of the analytic trainability results.

Two kinds of checks live here.  The single-rotation averaging identities
(the commutant-split lemmas) are verified by uniform quadrature over one
angle: the integrands are trigonometric polynomials of degree at most 4,
so a uniform rule with enough nodes is exact up to roundoff and the
comparison against the closed form is a genuine equality test, not an
approximation.  The circuit-level lower bounds on E[f^2] and
E[||grad f||^2] are verified by Monte Carlo over uniform parameter draws;
a lower bound can only be checked for non-violation, so reports use a
one-sided three-standard-error acceptance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import init_uniform
from .gradients import LossEvaluator, grad_and_value
from .observables import PauliString, expectation_exact, three_bar
from .density import MixedState, expectation_mixed
from .parallel import parallel_map
from .rng import as_rng, derive_rng


def _check_hermitian(name, m, atol=1e-10):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if np.abs(m - m.conj().T).max() > atol:
        raise ValueError(f"{name} is not hermitian within {atol}")
    return m


@dataclass(frozen=True)
class CommutantSplit:
    """O = o1 + o2 with o1 commuting and o2 anti-commuting with G."""
    o1: np.ndarray
    o2: np.ndarray


def commutant_split(o, g):
    """o1 = (O + GOG)/2, o2 = (O - GOG)/2 for a hermitian unitary G."""
    o = _check_hermitian("O", o)
    g = _check_hermitian("G", g, atol=1e-12)
    if np.abs(g @ g - np.eye(g.shape[0])).max() > 1e-12:
        raise ValueError("G must be involutory (G @ G = I within 1e-12)")
    if o.shape != g.shape:
        raise ValueError(f"O and G shapes differ: {o.shape} vs {g.shape}")
    gog = g @ o @ g
    return CommutantSplit((o + gog) / 2.0, (o - gog) / 2.0)


def _rotation_of(g, theta):
    """exp(-i*theta*G) = I cos(theta) - i G sin(theta) for involutory G."""
    eye = np.eye(g.shape[0], dtype=np.complex128)
    return np.cos(theta) * eye - 1j * np.sin(theta) * g


def _check_density(name, rho):
    rho = _check_hermitian(name, rho)
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError(f"{name} must have unit trace")
    return rho


def _tr(a, b):
    return float(np.trace(a @ b).real)


def _quad_nodes(nodes):
    nodes = int(nodes)
    if nodes < 2:
        raise ValueError(f"need at least 2 quadrature nodes, got {nodes}")
    return np.arange(nodes) * (2.0 * np.pi / nodes)


def lemma2_check(o, g, rho1, rho2, nodes=64):
    """Averaging identity for the product of two conjugated traces.

    lhs: uniform quadrature over theta of
         Tr[O W rho1 W^dag] * Tr[O W rho2 W^dag],  W = exp(-i*theta*G);
    rhs: Tr[O1 rho1]Tr[O1 rho2] + (1/2)Tr[O2 rho1]Tr[O2 rho2]
         + (1/2)Tr[iO2G rho1]Tr[iO2G rho2].
    Returns (lhs, rhs, |lhs - rhs|).  The integrand is a trig polynomial of
    degree <= 4, so any nodes >= 8 makes the quadrature exact to roundoff
    (fewer nodes under-resolve it, which the CLI uses as a failure demo).
    """
    split = commutant_split(o, g)
    rho1 = _check_density("rho1", rho1)
    rho2 = _check_density("rho2", rho2)
    o = np.asarray(o, dtype=np.complex128)
    lhs = 0.0
    for theta in _quad_nodes(nodes):
        w = _rotation_of(g, theta)
        lhs += _tr(o, w @ rho1 @ w.conj().T) * _tr(o, w @ rho2 @ w.conj().T)
    lhs /= int(nodes)
    io2g = 1j * (split.o2 @ g)
    rhs = (_tr(split.o1, rho1) * _tr(split.o1, rho2)
           + 0.5 * _tr(split.o2, rho1) * _tr(split.o2, rho2)
           + 0.5 * _tr(io2g, rho1) * _tr(io2g, rho2))
    return lhs, rhs, abs(lhs - rhs)


def lemma3_check(o, g, rho, nodes=64):
    """Averaging identity for the squared parameter-shift difference.

    lhs: quadrature of (Tr[O W+ rho W+^dag] - Tr[O W- rho W-^dag])^2 with
    W+- = exp(-i*(theta +- pi/4)*G);
    rhs: 2 Tr[O2 rho]^2 + 2 Tr[iO2G rho]^2.
    """
    split = commutant_split(o, g)
    rho = _check_density("rho", rho)
    o = np.asarray(o, dtype=np.complex128)
    lhs = 0.0
    for theta in _quad_nodes(nodes):
        wp = _rotation_of(g, theta + np.pi / 4)
        wm = _rotation_of(g, theta - np.pi / 4)
        diff = _tr(o, wp @ rho @ wp.conj().T) - _tr(o, wm @ rho @ wm.conj().T)
        lhs += diff * diff
    lhs /= int(nodes)
    io2g = 1j * (split.o2 @ g)
    rhs = 2.0 * _tr(split.o2, rho) ** 2 + 2.0 * _tr(io2g, rho) ** 2
    return lhs, rhs, abs(lhs - rhs)


def _sigma_input_trace(sigma, rho_in):
    if isinstance(rho_in, MixedState):
        return expectation_mixed(rho_in, sigma)
    return expectation_exact(rho_in, sigma)


def _check_sigma(sigma, s):
    if not isinstance(sigma, PauliString):
        raise TypeError("sigma_i must be a PauliString")
    if sigma.locality != s:
        raise ValueError(f"observable locality {sigma.locality} != S = {s}")
    if sigma.support and max(sigma.support) >= s:
        raise ValueError(
            f"observable support {sigma.support} extends past the first {s} qubits"
        )


def theorem1_bound(num_blocks, s, rho_in, sigma_i):
    """Lower bound on E[f^2]: (Tr[sigma_{3|i} rho_in])^2 / 8^{L*S}."""
    _check_sigma(sigma_i, s)
    tr = _sigma_input_trace(three_bar(sigma_i), rho_in)
    return tr * tr / 8.0 ** (int(num_blocks) * int(s))


def theorem2_bound(num_blocks, s, rho_in, sigma_i):
    """Lower bound on E[||grad f||^2]: 12(L-1)S/8^{L*S} * (Tr[sigma_{3|i} rho_in])^2."""
    _check_sigma(sigma_i, s)
    tr = _sigma_input_trace(three_bar(sigma_i), rho_in)
    return 12.0 * (int(num_blocks) - 1) * int(s) * tr * tr / 8.0 ** (int(num_blocks) * int(s))


@dataclass(frozen=True)
class BoundReport:
    """One-sided Monte Carlo check of a lower bound.

    `passed` means the estimate does not fall more than three standard
    errors below the bound; a lower bound cannot be confirmed tight by
    sampling, only non-violated.
    """
    estimate: float
    stderr: float
    bound: float
    samples: int
    passed: bool

    @classmethod
    def build(cls, estimate, stderr, bound, samples):
        return cls(float(estimate), float(stderr), float(bound), int(samples),
                   bool(estimate >= bound - 3.0 * stderr))

    def to_json_dict(self):
        return {"estimate": self.estimate, "stderr": self.stderr,
                "bound": self.bound, "samples": self.samples, "passed": self.passed}


def _mc_chunk(args):
    """Per-sample f^2 or restricted grad-norm^2 values for one index range."""
    circuit, sigma, input_state, seed, start, stop, want_grad, slot_mask = args
    evaluator = LossEvaluator(circuit, sigma, input_state)
    out = np.empty(stop - start)
    for i in range(start, stop):
        theta = init_uniform(circuit.param_count, derive_rng(seed, i))
        grad, f = grad_and_value(evaluator, theta)
        if want_grad:
            if slot_mask is not None:
                grad = grad[slot_mask]
            out[i - start] = float(np.dot(grad, grad))
        else:
            out[i - start] = f * f
    return out


def _mc_values(circuit, sigma, input_state, samples, rng, want_grad,
               slot_mask=None, jobs=1):
    samples = int(samples)
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if isinstance(rng, (int, np.integer)):
        seed = int(rng)
    else:
        # a live generator cannot be split deterministically across tasks;
        # draw one child seed from it and proceed with derived streams
        seed = int(as_rng(rng).integers(2 ** 63))
    chunk = max(1, samples // max(1, 8 * jobs)) if jobs > 1 else samples
    ranges = [(s, min(s + chunk, samples)) for s in range(0, samples, chunk)]
    tasks = [(circuit, sigma, input_state, seed, a, b, want_grad, slot_mask)
             for a, b in ranges]
    return np.concatenate(parallel_map(_mc_chunk, tasks, jobs=jobs))


def _report(values, bound):
    n = len(values)
    stderr = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return BoundReport.build(float(values.mean()), stderr, bound, n)


def mc_expected_f_sq(circuit, sigma_i, input_state, samples, rng, jobs=1):
    """Monte Carlo E[f^2] over uniform draws vs the depth-independent bound.

    `rng` may be an int master seed (sample i uses the derived stream
    (seed, i), so results are independent of scheduling) or a Generator.
    """
    bound = theorem1_bound(_block_count(circuit), _first_s(circuit, sigma_i),
                           input_state, sigma_i)
    values = _mc_values(circuit, sigma_i, input_state, samples, rng, False, jobs=jobs)
    return _report(values, bound)


def mc_expected_grad_norm_sq(circuit, sigma_i, input_state, samples, rng,
                             slots=None, jobs=1):
    """Monte Carlo E[||grad f||^2] over uniform draws vs the gradient bound.

    With `slots` the sum runs over that subset of gradient components only;
    the whole-gradient bound still applies to it when the subset covers the
    first-S rotations of the first L-1 blocks, which is the restricted sum
    the proofs actually lower-bound.
    """
    bound = theorem2_bound(_block_count(circuit), _first_s(circuit, sigma_i),
                           input_state, sigma_i)
    slot_mask = None
    if slots is not None:
        slot_mask = np.zeros(circuit.param_count, dtype=bool)
        slot_mask[list(slots)] = True
    values = _mc_values(circuit, sigma_i, input_state, samples, rng, True,
                        slot_mask=slot_mask, jobs=jobs)
    return _report(values, bound)


def _first_s(circuit, sigma):
    """Width S of the controlled layers, taken from the block structure."""
    if circuit.cl_block_slots:
        return len(circuit.cl_block_slots[0]) // 3
    return sigma.locality


def _block_count(circuit):
    if circuit.cl_block_slots is not None:
        return len(circuit.cl_block_slots)
    if circuit.param_count == 0:
        return 0
    raise ValueError("bound checks need a controlled-layer circuit "
                     "(block structure unknown for this ansatz)")


def random_hermitian(dim, rng):
    """GUE-style hermitian matrix, entries O(1)."""
    rng = as_rng(rng)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2.0


def random_involution(dim, rng):
    """Random hermitian unitary: U diag(+-1) U^dag with U Haar-distributed."""
    rng = as_rng(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    signs = rng.integers(0, 2, dim) * 2.0 - 1.0
    return (q * signs) @ q.conj().T


def random_density(dim, rng):
    """Wishart-normalized random density matrix (full rank a.s.)."""
    rng = as_rng(rng)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def bloch_sample(mode, samples, rng):
    """Bloch vectors of single-qubit states drawn by either recipe.

    uniform-angles: R_Y(theta2) R_X(theta1) |0> with both angles uniform in
    [0, 2*pi); haar-local: U|0> with U Haar on U(2) (complex-Gaussian + QR
    + phase fix, vectorized).  Returns an (samples, 3) array of (x, y, z).
    """
    rng = as_rng(rng)
    samples = int(samples)
    mode = str(mode).lower()
    if mode in ("uniform", "uniform-angles"):
        t1 = rng.uniform(0.0, 2.0 * np.pi, samples)
        t2 = rng.uniform(0.0, 2.0 * np.pi, samples)
        c1, s1 = np.cos(t1), np.sin(t1)
        c2, s2 = np.cos(t2), np.sin(t2)
        a = c2 * c1 + 1j * s2 * s1
        b = s2 * c1 - 1j * c2 * s1
    elif mode in ("haar", "haar-local"):
        z = (rng.standard_normal((samples, 2, 2))
             + 1j * rng.standard_normal((samples, 2, 2))) / np.sqrt(2.0)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r, axis1=1, axis2=2)
        q = q * (d / np.abs(d))[:, None, :]
        a = q[:, 0, 0]
        b = q[:, 1, 0]
    else:
        raise ValueError(f"unknown mode {mode!r}; use 'uniform-angles' or 'haar-local'")
    cross = np.conj(a) * b
    return np.column_stack((2.0 * cross.real, 2.0 * cross.imag,
                            np.abs(a) ** 2 - np.abs(b) ** 2))
