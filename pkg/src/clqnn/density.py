"""Density-matrix backend with per-qubit depolarizing noise.

The depolarizing channel N_q(rho) = q*rho + (1-q)/2 * I_t (x) Tr_t[rho]
is applied to every qubit after each operation layer recorded in the
circuit's layer marks.  The partial-trace form above is algebraically
identical to the four-term Kraus conjugation
((1+3q)/4) rho + ((1-q)/4)(X rho X + Y rho Y + Z rho Z)
and costs one pass over the matrix instead of four sandwiches; the test
suite checks the two forms against each other.

Little-endian indexing throughout, matching the pure backend.
"""

from __future__ import annotations

import numpy as np

from .observables import _check_register
from .circuits import CNOT, CZ, Rotation, check_theta
from .states import rotation_matrix

MAX_NOISY_QUBITS = 10


class MixedState:
    """N-qubit density matrix."""

    __slots__ = ("num_qubits", "rho")

    def __init__(self, num_qubits, rho):
        num_qubits = int(num_qubits)
        if num_qubits < 1 or num_qubits > MAX_NOISY_QUBITS:
            raise ValueError(
                f"num_qubits must be in [1, {MAX_NOISY_QUBITS}] for the density backend, "
                f"got {num_qubits}"
            )
        rho = np.ascontiguousarray(rho, dtype=np.complex128)
        dim = 1 << num_qubits
        if rho.shape != (dim, dim):
            raise ValueError(f"rho has shape {rho.shape}, expected ({dim}, {dim})")
        self.num_qubits = num_qubits
        self.rho = rho

    @classmethod
    def zero(cls, num_qubits):
        """|0...0><0...0|."""
        dim = 1 << int(num_qubits)
        rho = np.zeros((dim, dim), dtype=np.complex128)
        rho[0, 0] = 1.0
        return cls(num_qubits, rho)

    @classmethod
    def from_pure(cls, state):
        v = state.amplitudes
        return cls(state.num_qubits, np.outer(v, v.conj()))

    def copy(self):
        return MixedState(self.num_qubits, self.rho.copy())

    def trace(self):
        return float(np.trace(self.rho).real)

    def _check_qubit(self, q):
        if not 0 <= int(q) < self.num_qubits:
            raise IndexError(f"qubit {q} out of range for {self.num_qubits} qubits")

    def apply_unitary_1q(self, u, target):
        """rho -> U rho U^dagger with U acting on `target`."""
        self._check_qubit(target)
        u = np.asarray(u, dtype=np.complex128)
        dim = 1 << self.num_qubits
        high = dim >> (target + 1)
        low = 1 << target
        # left multiply on the row index bit
        r = self.rho.reshape(high, 2, low, dim)
        a = r[:, 0].copy()
        b = r[:, 1].copy()
        r[:, 0] = u[0, 0] * a + u[0, 1] * b
        r[:, 1] = u[1, 0] * a + u[1, 1] * b
        # right multiply (conjugated) on the column index bit
        c = self.rho.reshape(dim, high, 2, low)
        a = c[:, :, 0].copy()
        b = c[:, :, 1].copy()
        c[:, :, 0] = np.conj(u[0, 0]) * a + np.conj(u[0, 1]) * b
        c[:, :, 1] = np.conj(u[1, 0]) * a + np.conj(u[1, 1]) * b
        return self

    def apply_rotation(self, axis, theta, target):
        return self.apply_unitary_1q(rotation_matrix(axis, theta), target)

    def apply_cz(self, a, b):
        self._check_qubit(a)
        self._check_qubit(b)
        if a == b:
            raise ValueError("CZ endpoints must be distinct qubits")
        dim = 1 << self.num_qubits
        mask = (1 << int(a)) | (1 << int(b))
        idx = np.arange(dim)
        signs = np.where((idx & mask) == mask, -1.0, 1.0)
        self.rho *= signs[:, None]
        self.rho *= signs[None, :]
        return self

    def apply_cnot(self, control, target):
        self._check_qubit(control)
        self._check_qubit(target)
        if control == target:
            raise ValueError("CNOT control and target must be distinct qubits")
        dim = 1 << self.num_qubits
        idx = np.arange(dim)
        perm = np.where(idx & (1 << int(control)), idx ^ (1 << int(target)), idx)
        self.rho = np.ascontiguousarray(self.rho[perm][:, perm])
        return self

    def __repr__(self):
        return f"MixedState(num_qubits={self.num_qubits})"


def depolarize_qubit(state, q, target):
    """Single-qubit depolarizing channel with keep-probability q on `target`."""
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"noise parameter must lie in [0, 1], got {q}")
    state._check_qubit(target)
    n = state.num_qubits
    dim = 1 << n
    high = dim >> (target + 1)
    low = 1 << target
    v = state.rho.reshape(high, 2, low, high, 2, low)
    # (1-q)/2 * I_t (x) Tr_t[rho], computed before rho is scaled
    mix = (v[:, 0, :, :, 0, :] + v[:, 1, :, :, 1, :]) * ((1.0 - q) / 2.0)
    state.rho *= q
    v[:, 0, :, :, 0, :] += mix
    v[:, 1, :, :, 1, :] += mix
    return state


def run_noisy(circuit, theta, q, input_state):
    """Apply the circuit to a copy of input_state, depolarizing every qubit
    with parameter q after each layer mark."""
    theta = check_theta(circuit, theta)
    if input_state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"state has {input_state.num_qubits} qubits, circuit has {circuit.num_qubits}"
        )
    out = input_state.copy()
    marks = iter(circuit.layer_marks)
    next_mark = next(marks, None)
    for i, op in enumerate(circuit.ops):
        if isinstance(op, Rotation):
            ang = theta[op.slot] if op.slot is not None else op.angle
            out.apply_rotation(op.axis, ang, op.qubit)
        elif isinstance(op, CZ):
            out.apply_cz(op.a, op.b)
        elif isinstance(op, CNOT):
            out.apply_cnot(op.control, op.target)
        while next_mark is not None and next_mark == i + 1:
            for qubit in range(circuit.num_qubits):
                depolarize_qubit(out, q, qubit)
            next_mark = next(marks, None)
    return out


def expectation_mixed(state, p):
    """Tr[P rho] for a PauliString p."""
    _check_register(state, p.num_qubits)
    dim = 1 << state.num_qubits
    idx = np.arange(dim)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & p.zmask) & 1)
    vals = state.rho[idx, idx ^ p.xmask]
    return float((p.phase * np.dot(signs, vals)).real)
