"""Dense pure-state simulator.

A PureState stores the full complex128 amplitude vector of an N-qubit
register in little-endian order (qubit 0 = least significant bit of the
basis index).  Gate methods mutate the state in place and return self so
calls can be chained; callers that need the original should copy() first.

Rotation convention: R_G(theta) = exp(-i*theta*G), the full-angle form.
Under it R_X(theta)|0> has <Z> = cos(2*theta) and the parameter-shift rule
uses +-pi/4 offsets.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as _k

MAX_QUBITS = 22

_AXIS_NAMES = {"X": _k.AX_X, "Y": _k.AX_Y, "Z": _k.AX_Z}
_AXIS_CODES = {_k.AX_X: "X", _k.AX_Y: "Y", _k.AX_Z: "Z"}


def axis_index(axis):
    """Normalize an axis given as 'X'/'Y'/'Z' (any case) or 0/1/2."""
    if isinstance(axis, str):
        try:
            return _AXIS_NAMES[axis.upper()]
        except KeyError:
            raise ValueError(f"unknown rotation axis {axis!r}") from None
    axis = int(axis)
    if axis not in (_k.AX_X, _k.AX_Y, _k.AX_Z):
        raise ValueError(f"unknown rotation axis code {axis}")
    return axis


def axis_name(axis):
    return _AXIS_CODES[axis_index(axis)]


def rotation_matrix(axis, theta):
    """2x2 matrix of exp(-i*theta*G) for G in {X, Y, Z}."""
    axis = axis_index(axis)
    c = np.cos(theta)
    s = np.sin(theta)
    if axis == _k.AX_X:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if axis == _k.AX_Y:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=np.complex128)


class PureState:
    """N-qubit statevector with in-place gate application."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits, amplitudes):
        num_qubits = int(num_qubits)
        if num_qubits < 1 or num_qubits > MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << num_qubits,):
            raise ValueError(
                f"amplitude vector has shape {amplitudes.shape}, expected ({1 << num_qubits},)"
            )
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, num_qubits):
        """|0...0>."""
        vec = np.zeros(1 << int(num_qubits), dtype=np.complex128)
        vec[0] = 1.0
        return cls(num_qubits, vec)

    @classmethod
    def from_amplitudes(cls, amplitudes):
        """Wrap an explicit amplitude vector; must be normalized within 1e-8."""
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        n = int(amplitudes.shape[0]).bit_length() - 1
        if amplitudes.shape[0] != (1 << n):
            raise ValueError(f"amplitude length {amplitudes.shape[0]} is not a power of two")
        state = cls(n, amplitudes.copy())
        if abs(state.norm() - 1.0) > 1e-8:
            raise ValueError(f"amplitudes not normalized (norm {state.norm():.6g})")
        return state

    def copy(self):
        return PureState(self.num_qubits, self.amplitudes.copy())

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def inner(self, other):
        """<self|other>."""
        self._check_same_size(other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def apply_rotation(self, axis, theta, target):
        self._check_qubit(target)
        _k.apply_rot(self.amplitudes, axis_index(axis), float(theta), int(target))
        return self

    def apply_unitary_1q(self, u, target):
        self._check_qubit(target)
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (2, 2):
            raise ValueError(f"single-qubit unitary must be 2x2, got {u.shape}")
        if np.abs(u @ u.conj().T - np.eye(2)).max() > 1e-12:
            raise ValueError("matrix is not unitary within 1e-12")
        _k.apply_1q(self.amplitudes, u[0, 0], u[0, 1], u[1, 0], u[1, 1], int(target))
        return self

    def apply_cz(self, a, b):
        self._check_qubit(a)
        self._check_qubit(b)
        if a == b:
            raise ValueError("CZ endpoints must be distinct qubits")
        _k.apply_cz(self.amplitudes, int(a), int(b))
        return self

    def apply_cnot(self, control, target):
        self._check_qubit(control)
        self._check_qubit(target)
        if control == target:
            raise ValueError("CNOT control and target must be distinct qubits")
        _k.apply_cnot(self.amplitudes, int(control), int(target))
        return self

    def _check_qubit(self, q):
        if not 0 <= int(q) < self.num_qubits:
            raise IndexError(f"qubit {q} out of range for {self.num_qubits} qubits")

    def _check_same_size(self, other):
        if other.num_qubits != self.num_qubits:
            raise ValueError(
                f"qubit count mismatch: {self.num_qubits} vs {other.num_qubits}"
            )

    def __repr__(self):
        return f"PureState(num_qubits={self.num_qubits})"
