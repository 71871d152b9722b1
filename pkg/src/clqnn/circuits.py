"""Parameterized circuit IR, ansatz builders, and initialization strategies.

A ParamCircuit is an ordered list of gate ops plus layer marks: indices
into the op list after which a noise channel acts on every qubit when the
circuit runs on the density-matrix backend.  Builders emit rotations
sub-layer by sub-layer (all X rotations of a band, then all Y, then all X)
so that every mark boundary is contiguous in the op list.

The controlled-layer ansatz repeats L blocks of: a CZ layer on a ring of
neighboring qubits, an R_X R_Y R_X triple with fresh parameters on each of
the first S qubits, and an inner ansatz W' on the remaining qubits (either
one R_X R_Y R_X triple per qubit, or a hardware-efficient sub-circuit).
The hardware-efficient ansatz repeats R_X R_Y R_X on every qubit followed
by a CNOT ring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels as _k
from .rng import as_rng
from .states import MAX_QUBITS, axis_index, axis_name


@dataclass(frozen=True)
class Rotation:
    """Pauli rotation exp(-i*angle*G); parameterized when slot is set.

    axis accepts 'x'/'y'/'z' or 0/1/2 and is stored as the integer code.
    """
    axis: int
    qubit: int
    slot: int | None = None
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "axis", axis_index(self.axis))


@dataclass(frozen=True)
class CZ:
    a: int
    b: int


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int


@dataclass(frozen=True)
class TensorRotations:
    """Inner ansatz: one R_X R_Y R_X triple per remaining qubit."""


@dataclass(frozen=True)
class HardwareEfficient:
    """Inner ansatz: `layers` hardware-efficient layers on the remaining qubits."""
    layers: int


@dataclass(frozen=True)
class GateBudget:
    n_1q: int
    n_cz: int
    n_cnot: int


class ParamCircuit:
    """Immutable gate list with layer marks and parameter metadata.

    xyx_triples records, for builders that emit R_X R_Y R_X triples, the
    slot indices (x1, y, x2) of each triple in emission order; haar-local
    initialization assigns one Euler-angle draw per triple.  cl_block_slots
    records, for the controlled-layer builder only, the slots of the
    first-S rotations of each block.
    """

    def __init__(self, num_qubits, ops, layer_marks, xyx_triples=(),
                 cl_block_slots=None, label=""):
        num_qubits = int(num_qubits)
        if num_qubits < 1 or num_qubits > MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
        ops = tuple(ops)
        layer_marks = tuple(int(m) for m in layer_marks)
        slots_seen = []
        for i, op in enumerate(ops):
            if isinstance(op, Rotation):
                if not 0 <= op.qubit < num_qubits:
                    raise ValueError(f"op {i}: qubit {op.qubit} out of range")
                if (op.slot is None) == (op.angle is None):
                    raise ValueError(f"op {i}: rotation needs exactly one of slot or angle")
                if op.slot is not None:
                    slots_seen.append(op.slot)
            elif isinstance(op, (CZ, CNOT)):
                qs = (op.a, op.b) if isinstance(op, CZ) else (op.control, op.target)
                if not all(0 <= q < num_qubits for q in qs):
                    raise ValueError(f"op {i}: qubit pair {qs} out of range")
                if qs[0] == qs[1]:
                    raise ValueError(f"op {i}: two-qubit gate endpoints must differ")
            else:
                raise TypeError(f"op {i}: unknown gate type {type(op).__name__}")
        param_count = len(slots_seen)
        if sorted(slots_seen) != list(range(param_count)):
            raise ValueError("parameter slots must be 0..P-1, each used exactly once")
        if layer_marks:
            if list(layer_marks) != sorted(set(layer_marks)):
                raise ValueError("layer marks must be strictly increasing")
            if layer_marks[0] < 1 or layer_marks[-1] != len(ops):
                raise ValueError("layer marks must lie in [1, len(ops)] and end at len(ops)")
        elif ops:
            raise ValueError("non-empty circuit needs at least the final layer mark")
        self.num_qubits = num_qubits
        self.ops = ops
        self.layer_marks = layer_marks
        self.param_count = param_count
        self.xyx_triples = tuple(tuple(t) for t in xyx_triples)
        self.cl_block_slots = None if cl_block_slots is None else tuple(
            tuple(b) for b in cl_block_slots
        )
        self.label = str(label)

    @cached_property
    def compiled(self):
        """Struct-of-arrays form consumed by the numba kernels."""
        n = len(self.ops)
        kinds = np.empty(n, dtype=np.int8)
        q0 = np.zeros(n, dtype=np.int32)
        q1 = np.zeros(n, dtype=np.int32)
        axes = np.zeros(n, dtype=np.int8)
        slots = np.full(n, -1, dtype=np.int32)
        fixed = np.zeros(n, dtype=np.float64)
        for i, op in enumerate(self.ops):
            if isinstance(op, Rotation):
                kinds[i] = _k.KIND_ROT
                q0[i] = op.qubit
                axes[i] = op.axis
                if op.slot is not None:
                    slots[i] = op.slot
                else:
                    fixed[i] = op.angle
            elif isinstance(op, CZ):
                kinds[i] = _k.KIND_CZ
                q0[i] = op.a
                q1[i] = op.b
            else:
                kinds[i] = _k.KIND_CNOT
                q0[i] = op.control
                q1[i] = op.target
        return kinds, q0, q1, axes, slots, fixed

    def __len__(self):
        return len(self.ops)

    def __repr__(self):
        return (f"ParamCircuit({self.label or 'circuit'}: {self.num_qubits} qubits, "
                f"{len(self.ops)} ops, P={self.param_count})")


def check_theta(circuit, theta):
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    if theta.shape != (circuit.param_count,):
        raise ValueError(
            f"theta has shape {theta.shape}, circuit expects ({circuit.param_count},)"
        )
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta contains non-finite entries")
    return theta


def run(circuit, theta, input_state):
    """Apply the bound circuit to a copy of input_state."""
    theta = check_theta(circuit, theta)
    if input_state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"state has {input_state.num_qubits} qubits, circuit has {circuit.num_qubits}"
        )
    out = input_state.copy()
    kinds, q0, q1, axes, slots, fixed = circuit.compiled
    _k.run_window(out.amplitudes, kinds, q0, q1, axes, slots, fixed, theta,
                  0, len(kinds))
    return out


def ring_pairs(num_qubits):
    """Nearest-neighbor ring (0,1),(1,2),...,(N-1,0); degenerate N=2 ring
    reduces to the single pair (0,1) since both wrap edges coincide."""
    if num_qubits == 2:
        return ((0, 1),)
    return tuple((i, (i + 1) % num_qubits) for i in range(num_qubits))


class _Emitter:
    """Accumulates ops, marks, triples, and fresh slots for the builders."""

    def __init__(self):
        self.ops = []
        self.marks = []
        self.next_slot = 0
        self.triples = []

    def mark(self):
        self.marks.append(len(self.ops))

    def xyx_band(self, qubits):
        """R_X, R_Y, R_X sub-layers over `qubits`, one mark per sub-layer.

        Returns the slot range used.  Sub-layers are emitted axis-major so
        each one is a contiguous op span; the triple of qubit q therefore
        has slots (base+i, base+m+i, base+2m+i) with m = len(qubits).
        """
        qubits = list(qubits)
        m = len(qubits)
        base = self.next_slot
        for ax in (_k.AX_X, _k.AX_Y, _k.AX_X):
            for q in qubits:
                self.ops.append(Rotation(ax, q, slot=self.next_slot))
                self.next_slot += 1
            self.mark()
        for i in range(m):
            self.triples.append((base + i, base + m + i, base + 2 * m + i))
        return range(base, self.next_slot)

    def cz_layer(self, pairs):
        for a, b in pairs:
            self.ops.append(CZ(a, b))
        self.mark()

    def cnot_ring(self, qubits):
        qubits = list(qubits)
        m = len(qubits)
        for i in range(m):
            self.ops.append(CNOT(qubits[i], qubits[(i + 1) % m]))
        self.mark()


def build_cl_qnn(num_qubits, s, num_blocks, inner, cz_pairs=None):
    """Controlled-layer ansatz: `num_blocks` blocks of CZ layer, first-S
    rotation triples, and the inner ansatz on qubits s..N-1.

    cz_pairs overrides the default nearest-neighbor ring.
    """
    n = int(num_qubits)
    s = int(s)
    num_blocks = int(num_blocks)
    if not 1 <= s < n:
        raise ValueError(f"need 1 <= S < N, got S={s}, N={n}")
    if num_blocks < 1:
        raise ValueError(f"need at least one block, got {num_blocks}")
    if isinstance(inner, HardwareEfficient):
        if inner.layers < 1:
            raise ValueError("hardware-efficient inner ansatz needs layers >= 1")
        if n - s < 2:
            raise ValueError("hardware-efficient inner ansatz needs at least 2 remaining qubits")
    elif not isinstance(inner, TensorRotations):
        raise TypeError(f"unknown inner ansatz {inner!r}")
    if cz_pairs is None:
        pairs = ring_pairs(n)
    else:
        pairs = tuple((int(a), int(b)) for a, b in cz_pairs)
    em = _Emitter()
    block_slots = []
    rest = range(s, n)
    for _ in range(num_blocks):
        em.cz_layer(pairs)
        block_slots.append(tuple(em.xyx_band(range(s))))
        if isinstance(inner, TensorRotations):
            em.xyx_band(rest)
        else:
            for _layer in range(inner.layers):
                em.xyx_band(rest)
                em.cnot_ring(rest)
    return ParamCircuit(n, em.ops, em.marks, xyx_triples=em.triples,
                        cl_block_slots=block_slots, label="cl")


def build_he_ansatz(num_qubits, num_layers):
    """Hardware-efficient ansatz: per layer, R_X R_Y R_X on every qubit and
    a CNOT ring (0,1),(1,2),...,(N-1,0)."""
    n = int(num_qubits)
    num_layers = int(num_layers)
    if n < 2:
        raise ValueError(f"hardware-efficient ansatz needs N >= 2, got {n}")
    if num_layers < 1:
        raise ValueError(f"need at least one layer, got {num_layers}")
    em = _Emitter()
    for _ in range(num_layers):
        em.xyx_band(range(n))
        em.cnot_ring(range(n))
    return ParamCircuit(n, em.ops, em.marks, xyx_triples=em.triples, label="he")


def build_random_qnn(num_qubits, budget, rng):
    """Randomly structured circuit hitting an exact gate budget.

    Rotations get a uniformly random axis and qubit; two-qubit gates get
    uniformly random distinct pairs; the whole gate list is then uniformly
    shuffled.  Parameter slots number the rotations in final op order.
    Every gate is its own operation layer (the ansatz has no layer
    structure to group by).
    """
    n = int(num_qubits)
    if isinstance(budget, dict):
        budget = GateBudget(**budget)
    rng = as_rng(rng)
    if min(budget.n_1q, budget.n_cz, budget.n_cnot) < 0:
        raise ValueError(f"gate budget must be non-negative, got {budget}")
    if (budget.n_cz > 0 or budget.n_cnot > 0) and n < 2:
        raise ValueError("two-qubit gates need at least 2 qubits")
    protos = []
    for _ in range(budget.n_1q):
        protos.append(("rot", int(rng.integers(3)), int(rng.integers(n))))
    for _ in range(budget.n_cz):
        a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
        protos.append(("cz", a, b))
    for _ in range(budget.n_cnot):
        a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
        protos.append(("cnot", a, b))
    order = rng.permutation(len(protos))
    ops = []
    slot = 0
    for i in order:
        kind, a, b = protos[i]
        if kind == "rot":
            ops.append(Rotation(a, b, slot=slot))
            slot += 1
        elif kind == "cz":
            ops.append(CZ(a, b))
        else:
            ops.append(CNOT(a, b))
    marks = range(1, len(ops) + 1)
    return ParamCircuit(n, ops, marks, label="random")


def gate_budget(circuit):
    n_1q = sum(1 for op in circuit.ops if isinstance(op, Rotation))
    n_cz = sum(1 for op in circuit.ops if isinstance(op, CZ))
    n_cnot = sum(1 for op in circuit.ops if isinstance(op, CNOT))
    return GateBudget(n_1q, n_cz, n_cnot)


def rotation_depth(circuit):
    """Depth of the single-qubit-rotation schedule: rotations on disjoint
    qubits share a time step, so this is the max rotation count on any one
    qubit.  Two-qubit gates are excluded from the count."""
    counts = [0] * circuit.num_qubits
    for op in circuit.ops:
        if isinstance(op, Rotation):
            counts[op.qubit] += 1
    return max(counts, default=0)


def init_uniform(param_count, rng):
    """i.i.d. uniform angles in [0, 2*pi)."""
    return as_rng(rng).uniform(0.0, 2.0 * np.pi, int(param_count))


def haar_random_unitary(rng):
    """Haar-distributed 2x2 unitary: complex-Gaussian matrix, QR
    orthonormalization, and the standard R-diagonal phase fix."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def xyx_angles(u):
    """Euler angles (theta1, theta2, theta3) with
    R_X(theta3) R_Y(theta2) R_X(theta1) equal to u up to global phase.

    Writing the product with sum/difference angles p = theta3 + theta1 and
    m = theta1 - theta3 against the special-unitary form of u gives
    cos(theta2), sin(theta2) >= 0 from hypotenuses and (p, m) from atan2.
    At the theta2 in {0, pi/2} poles only one of p, m is determined; the
    convention theta1 = 0 fixes the other.
    """
    u = np.asarray(u, dtype=np.complex128)
    det = np.linalg.det(u)
    su = u / np.sqrt(det)
    alpha = su[0, 0]
    beta = su[1, 0]
    cb = np.hypot(alpha.real, beta.imag)
    sb = np.hypot(beta.real, alpha.imag)
    theta2 = np.arctan2(sb, cb)
    if sb < 1e-12:
        p = np.arctan2(-beta.imag, alpha.real)
        m = -p
    elif cb < 1e-12:
        m = np.arctan2(alpha.imag, beta.real)
        p = -m
    else:
        p = np.arctan2(-beta.imag, alpha.real)
        m = np.arctan2(alpha.imag, beta.real)
    return float((p + m) / 2.0), float(theta2), float((p - m) / 2.0)


def haar_local_angles(rng):
    """XYX Euler angles of a fresh Haar-random 2x2 unitary."""
    return xyx_angles(haar_random_unitary(as_rng(rng)))


def init_haar_local(circuit, rng):
    """Initialize every R_X R_Y R_X triple from the local Haar distribution.

    Requires a circuit whose parameters all belong to xyx triples (the
    controlled-layer and hardware-efficient builders); the first/middle/last
    slots of each triple receive theta1/theta2/theta3 respectively, so the
    first-applied rotation gets theta1.
    """
    rng = as_rng(rng)
    covered = [s for t in circuit.xyx_triples for s in t]
    if sorted(covered) != list(range(circuit.param_count)):
        raise ValueError("circuit parameters do not form XYX triples; "
                         "haar-local initialization is undefined for it")
    theta = np.empty(circuit.param_count)
    for s1, s2, s3 in circuit.xyx_triples:
        t1, t2, t3 = haar_local_angles(rng)
        theta[s1] = t1
        theta[s2] = t2
        theta[s3] = t3
    return theta


def circuit_to_json(circuit):
    """JSON text {n, ops, layer_marks, meta}; inverse of circuit_from_json."""
    ops = []
    for op in circuit.ops:
        if isinstance(op, Rotation):
            entry = {"kind": "rotation", "qubits": [op.qubit], "axis": axis_name(op.axis)}
            if op.slot is not None:
                entry["slot"] = op.slot
            else:
                entry["angle"] = op.angle
        elif isinstance(op, CZ):
            entry = {"kind": "cz", "qubits": [op.a, op.b]}
        else:
            entry = {"kind": "cnot", "qubits": [op.control, op.target]}
        ops.append(entry)
    doc = {
        "n": circuit.num_qubits,
        "ops": ops,
        "layer_marks": list(circuit.layer_marks),
        "meta": {
            "label": circuit.label,
            "xyx_triples": [list(t) for t in circuit.xyx_triples],
            "cl_block_slots": None if circuit.cl_block_slots is None
            else [list(b) for b in circuit.cl_block_slots],
        },
    }
    return json.dumps(doc, sort_keys=True)


def circuit_from_json(text):
    doc = json.loads(text) if isinstance(text, str) else text
    ops = []
    for i, entry in enumerate(doc["ops"]):
        kind = entry["kind"]
        if kind == "rotation":
            ops.append(Rotation(axis_index(entry["axis"]), entry["qubits"][0],
                                slot=entry.get("slot"), angle=entry.get("angle")))
        elif kind == "cz":
            ops.append(CZ(*entry["qubits"]))
        elif kind == "cnot":
            ops.append(CNOT(*entry["qubits"]))
        else:
            raise ValueError(f"op {i}: unknown gate kind {kind!r}")
    meta = doc.get("meta", {})
    return ParamCircuit(doc["n"], ops, doc["layer_marks"],
                        xyx_triples=meta.get("xyx_triples", ()),
                        cl_block_slots=meta.get("cl_block_slots"),
                        label=meta.get("label", ""))
