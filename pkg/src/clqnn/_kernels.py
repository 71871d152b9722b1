"""Numba kernels for dense statevector simulation.

All kernels mutate the complex128 amplitude vector in place and assume
little-endian qubit indexing: qubit 0 is the least significant bit of the
basis-state index.  Rotations follow the full-angle convention
R_G(theta) = exp(-i*theta*G) = I*cos(theta) - i*G*sin(theta), so the
parameter-shift rule uses shifts of +-pi/4.

Kernels are strictly sequential and compiled without fastmath, which keeps
results bit-reproducible run to run on the same platform.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# gate kind codes shared with the circuit IR
KIND_ROT = 0
KIND_CZ = 1
KIND_CNOT = 2

# rotation axis codes
AX_X = 0
AX_Y = 1
AX_Z = 2

# exact parameter-shift offset for exp(-i*theta*G) with G a Pauli
SHIFT = np.pi / 4


@njit(cache=True)
def apply_1q(psi, u00, u01, u10, u11, target):
    """Apply a 2x2 unitary to `target`, pairing amplitudes that differ in bit `target`."""
    half = psi.shape[0] >> 1
    low = (1 << target) - 1
    bit = 1 << target
    for i in range(half):
        i0 = ((i & ~low) << 1) | (i & low)
        i1 = i0 | bit
        a0 = psi[i0]
        a1 = psi[i1]
        psi[i0] = u00 * a0 + u01 * a1
        psi[i1] = u10 * a0 + u11 * a1


@njit(cache=True)
def apply_rot(psi, axis, theta, target):
    c = np.cos(theta)
    s = np.sin(theta)
    if axis == AX_X:
        apply_1q(psi, c + 0j, -1j * s, -1j * s, c + 0j, target)
    elif axis == AX_Y:
        apply_1q(psi, c + 0j, -s + 0j, s + 0j, c + 0j, target)
    else:
        apply_1q(psi, c - 1j * s, 0j, 0j, c + 1j * s, target)


@njit(cache=True)
def apply_cz(psi, a, b):
    mask = (1 << a) | (1 << b)
    for i in range(psi.shape[0]):
        if (i & mask) == mask:
            psi[i] = -psi[i]


@njit(cache=True)
def apply_cnot(psi, control, target):
    cbit = 1 << control
    tbit = 1 << target
    for i in range(psi.shape[0]):
        if (i & cbit) and not (i & tbit):
            j = i | tbit
            tmp = psi[i]
            psi[i] = psi[j]
            psi[j] = tmp


@njit(cache=True)
def run_window(psi, kinds, q0, q1, axes, slots, fixed, theta, start, stop):
    """Apply ops[start:stop] to psi; slot -1 marks a fixed-angle rotation."""
    for i in range(start, stop):
        k = kinds[i]
        if k == KIND_ROT:
            s = slots[i]
            ang = theta[s] if s >= 0 else fixed[i]
            apply_rot(psi, axes[i], ang, q0[i])
        elif k == KIND_CZ:
            apply_cz(psi, q0[i], q1[i])
        else:
            apply_cnot(psi, q0[i], q1[i])


@njit(cache=True)
def _parity(v):
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


@njit(cache=True)
def pauli_expect(psi, xmask, zmask, phase):
    """<psi| P |psi> for P = phase * X^xmask * Z^zmask (phase = i^{#Y})."""
    acc = 0j
    for k in range(psi.shape[0]):
        sgn = 1.0 - 2.0 * _parity(k & zmask)
        acc += np.conj(psi[k ^ xmask]) * (sgn * psi[k])
    return (phase * acc).real


@njit(cache=True)
def ham_expect(psi, xmasks, zmasks, phases, coeffs):
    total = 0.0
    for t in range(coeffs.shape[0]):
        total += coeffs[t] * pauli_expect(psi, xmasks[t], zmasks[t], phases[t])
    return total


@njit(cache=True)
def shift_grad(psi0, kinds, q0, q1, axes, slots, fixed, theta,
               xmasks, zmasks, phases, coeffs, nparams):
    """Exact parameter-shift gradient with prefix reuse.

    Sweeps the circuit once; at each parameterized rotation the current
    prefix state is branched into the two +-pi/4 shifted copies and pushed
    through the remaining ops.  Returns (gradient, final state), so the
    loss at theta comes for free from the final state.

    `theta` is restored to its original contents on return (entries are
    saved and reassigned, never incremented, so restoration is bit-exact).
    Assumes every slot is used by exactly one gate.
    """
    nops = kinds.shape[0]
    psi = psi0.copy()
    branch = np.empty_like(psi)
    grad = np.zeros(nparams)
    for i in range(nops):
        s = slots[i]
        if kinds[i] == KIND_ROT and s >= 0:
            save = theta[s]
            branch[:] = psi
            theta[s] = save + SHIFT
            run_window(branch, kinds, q0, q1, axes, slots, fixed, theta, i, nops)
            fplus = ham_expect(branch, xmasks, zmasks, phases, coeffs)
            branch[:] = psi
            theta[s] = save - SHIFT
            run_window(branch, kinds, q0, q1, axes, slots, fixed, theta, i, nops)
            fminus = ham_expect(branch, xmasks, zmasks, phases, coeffs)
            theta[s] = save
            grad[s] = fplus - fminus
        run_window(psi, kinds, q0, q1, axes, slots, fixed, theta, i, i + 1)
    return grad, psi
