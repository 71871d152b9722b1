"""Pauli-string observables, Hamiltonians, and expectation values.

Pauli strings are stored as per-qubit codes 0=I, 1=X, 2=Y, 3=Z with entry j
acting on qubit j.  Text form reads the same way: "ZIX" puts Z on qubit 0
and X on qubit 2.

Exact expectations use the identity P = i^{#Y} * X^xmask * Z^zmask, which
reduces <psi|P|psi> to one pass over the amplitudes.  Finite-shot
expectations rotate every non-identity qubit into the Z basis, sample
bitstrings from the exact outcome distribution, and average the +-1 parity
of the support bits; no trajectory simulation is involved.
"""

from __future__ import annotations

import json

import numpy as np

from . import _kernels as _k
from .states import PureState

_PAULI_CHARS = "IXYZ"
_CHAR_CODES = {c: i for i, c in enumerate(_PAULI_CHARS)}

# Z-basis change unitaries: columns are the +1/-1 eigenstates of X resp. Y,
# so U maps |x+-> (or |y+->) to |0>/|1>.  The Y one equals Hadamard @ Sdg.
BASIS_CHANGE_X = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
BASIS_CHANGE_Y = np.array([[1, -1j], [1, 1j]], dtype=np.complex128) / np.sqrt(2.0)

_PAULI_MATS = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

_DENSE_MAX_QUBITS = 12


class PauliString:
    """Immutable tensor product of single-qubit Paulis."""

    __slots__ = ("codes", "xmask", "zmask", "phase")

    def __init__(self, codes):
        codes = tuple(int(c) for c in codes)
        if not codes:
            raise ValueError("PauliString needs at least one qubit")
        if any(c not in (0, 1, 2, 3) for c in codes):
            raise ValueError(f"Pauli codes must be 0..3, got {codes}")
        self.codes = codes
        xm = 0
        zm = 0
        ny = 0
        for q, c in enumerate(codes):
            if c in (1, 2):
                xm |= 1 << q
            if c in (2, 3):
                zm |= 1 << q
            if c == 2:
                ny += 1
        self.xmask = xm
        self.zmask = zm
        self.phase = 1j ** ny

    @classmethod
    def from_text(cls, text):
        try:
            return cls(_CHAR_CODES[c] for c in text.upper())
        except KeyError:
            raise ValueError(f"Pauli text may only contain I, X, Y, Z: {text!r}") from None

    @classmethod
    def single(cls, num_qubits, qubit, code):
        """One non-identity factor `code` on `qubit`, identity elsewhere."""
        codes = [0] * num_qubits
        codes[qubit] = code
        return cls(codes)

    def to_text(self):
        return "".join(_PAULI_CHARS[c] for c in self.codes)

    @property
    def num_qubits(self):
        return len(self.codes)

    @property
    def locality(self):
        return sum(1 for c in self.codes if c != 0)

    @property
    def support(self):
        return tuple(q for q, c in enumerate(self.codes) if c != 0)

    def __eq__(self, other):
        return isinstance(other, PauliString) and self.codes == other.codes

    def __hash__(self):
        return hash(self.codes)

    def __repr__(self):
        return f"PauliString({self.to_text()!r})"


def three_bar(p):
    """Replace every non-identity factor with Z."""
    return PauliString(3 if c != 0 else 0 for c in p.codes)


def three_bar_two(p):
    """Replace Y factors with Z; leave everything else alone."""
    return PauliString(3 if c == 2 else c for c in p.codes)


class Hamiltonian:
    """Real linear combination of Pauli strings on a common register.

    Duplicate strings are merged at construction (coefficients summed) and
    the first-appearance order of distinct strings is kept.
    """

    __slots__ = ("terms", "num_qubits", "_arrays", "_groups")

    def __init__(self, terms):
        merged = {}
        n = None
        for coeff, pauli in terms:
            coeff = float(coeff)
            if not isinstance(pauli, PauliString):
                raise TypeError(f"expected PauliString, got {type(pauli).__name__}")
            if n is None:
                n = pauli.num_qubits
            elif pauli.num_qubits != n:
                raise ValueError(
                    f"mixed register sizes: {n} vs {pauli.num_qubits} qubits"
                )
            if pauli in merged:
                merged[pauli] += coeff
            else:
                merged[pauli] = coeff
        if n is None:
            raise ValueError("Hamiltonian needs at least one term; "
                             "use Hamiltonian.empty(n) for the zero operator")
        self.num_qubits = n
        self.terms = tuple((c, p) for p, c in merged.items())
        self._arrays = None
        self._groups = None

    @classmethod
    def empty(cls, num_qubits):
        """The zero operator on num_qubits qubits (no terms)."""
        h = cls.__new__(cls)
        h.num_qubits = int(num_qubits)
        h.terms = ()
        h._arrays = None
        h._groups = None
        return h

    def compiled(self):
        """(xmasks, zmasks, phases, coeffs) arrays for the expectation kernel."""
        if self._arrays is None:
            self._arrays = (
                np.array([p.xmask for _, p in self.terms], dtype=np.int64),
                np.array([p.zmask for _, p in self.terms], dtype=np.int64),
                np.array([p.phase for _, p in self.terms], dtype=np.complex128),
                np.array([c for c, _ in self.terms], dtype=np.float64),
            )
        return self._arrays

    def measurement_groups(self):
        """Greedy qubit-wise measurement grouping for shot estimation.

        Terms land in one group when no qubit needs two different Pauli
        axes across them, so every group is sampled from a single rotated
        distribution.  Returns ((basis_ops, members), ...) where basis_ops
        are the (qubit, code) basis changes to apply (X and Y only; Z
        needs none) and members are (term_index, coeff, support_mask)
        triples.  The grouping depends only on the terms, so it is built
        once and cached.
        """
        if self._groups is None:
            groups = []
            for t, (coeff, p) in enumerate(self.terms):
                entry = (t, coeff, p.xmask | p.zmask)
                for assign, members in groups:
                    if all(assign.get(q, p.codes[q]) == p.codes[q]
                           for q in p.support):
                        assign.update((q, int(p.codes[q])) for q in p.support)
                        members.append(entry)
                        break
                else:
                    groups.append(({q: int(p.codes[q]) for q in p.support},
                                   [entry]))
            self._groups = tuple(
                (tuple((q, c) for q, c in sorted(assign.items()) if c != 3),
                 tuple(members))
                for assign, members in groups)
        return self._groups

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def to_json(self):
        return json.dumps([{"coeff": c, "pauli": p.to_text()} for c, p in self.terms])

    @classmethod
    def from_json(cls, text):
        items = json.loads(text) if isinstance(text, str) else text
        if not items:
            raise ValueError("empty Hamiltonian JSON needs an explicit qubit count; "
                             "use Hamiltonian.empty")
        return cls((item["coeff"], PauliString.from_text(item["pauli"])) for item in items)

    def __repr__(self):
        return f"Hamiltonian({len(self.terms)} terms on {self.num_qubits} qubits)"


def ising_hamiltonian(num_qubits):
    """Transverse-field Ising H = -(1/N) sum Z_i Z_{i+1} - (1/N) sum X_i, periodic.

    At N=2 the two wrap-around ZZ terms are the same string and merge into a
    single coefficient -1.
    """
    n = int(num_qubits)
    if n < 2:
        raise ValueError(f"Ising chain needs at least 2 qubits, got {n}")
    coeff = -1.0 / n
    terms = []
    for i in range(n):
        codes = [0] * n
        codes[i] = 3
        codes[(i + 1) % n] = 3
        terms.append((coeff, PauliString(codes)))
    for i in range(n):
        terms.append((coeff, PauliString.single(n, i, 1)))
    return Hamiltonian(terms)


def _check_register(state, num_qubits):
    if state.num_qubits != num_qubits:
        raise ValueError(
            f"register size mismatch: state has {state.num_qubits} qubits, "
            f"observable has {num_qubits}"
        )


def expectation_exact(state, p):
    """<psi| P |psi> as a float."""
    _check_register(state, p.num_qubits)
    return float(_k.pauli_expect(state.amplitudes, p.xmask, p.zmask, p.phase))


def _basis_ops(p):
    """(qubit, code) basis changes needed to measure p in the Z basis."""
    return tuple((q, int(p.codes[q])) for q in p.support if p.codes[q] != 3)


def _rotated_probabilities(state, basis_ops):
    """Outcome distribution after the given X/Y-to-Z basis changes."""
    if not basis_ops:
        return state.probabilities()
    work = state.copy()
    for q, c in basis_ops:
        u = BASIS_CHANGE_X if c == 1 else BASIS_CHANGE_Y
        _k.apply_1q(work.amplitudes, *u.ravel(), q)
    return work.probabilities()


def _parity_values(indices, mask):
    """+1/-1 eigenvalue for each sampled basis index."""
    par = np.bitwise_count(np.bitwise_and(indices, mask)) & 1
    return 1.0 - 2.0 * par.astype(np.float64)


def _sample_mean(cdf, mask, draws):
    idx = np.searchsorted(cdf, draws, side="right")
    return float(_parity_values(idx, mask).mean())


def expectation_shots(state, p, shots, rng):
    """Unbiased finite-shot estimate of <psi| P |psi>.

    Bitstrings are sampled from the exact rotated distribution via inverse
    transform (cumulative sum + searchsorted); each shot contributes the
    product of the +-1 eigenvalues on the support qubits.
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    _check_register(state, p.num_qubits)
    probs = _rotated_probabilities(state, _basis_ops(p))
    return _sample_mean(np.cumsum(probs), p.xmask | p.zmask, rng.random(shots))


def expectation_hamiltonian(state, h, shots=None, rng=None):
    """Sum of per-term expectations; shot mode samples each term independently.

    In shot mode the rng is consumed in term order (shots draws per term).
    Qubit-wise-compatible terms share one rotated distribution (see
    Hamiltonian.measurement_groups), which only saves work, not
    randomness: rotations on qubits outside a term's support leave the
    joint distribution of its support bits unchanged.
    """
    _check_register(state, h.num_qubits)
    if len(h) == 0:
        return 0.0
    if shots is None:
        xm, zm, ph, co = h.compiled()
        return float(_k.ham_expect(state.amplitudes, xm, zm, ph, co))
    if rng is None:
        raise ValueError("shot mode needs an rng")
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    draws = [rng.random(shots) for _ in h.terms]
    total = 0.0
    for basis_ops, members in h.measurement_groups():
        cdf = np.cumsum(_rotated_probabilities(state, basis_ops))
        for t, coeff, mask in members:
            total += coeff * _sample_mean(cdf, mask, draws[t])
    return total


def dense_matrix(obj):
    """Explicit 2^N x 2^N matrix of a PauliString or Hamiltonian (N <= 12).

    Kronecker factors are assembled from qubit N-1 down to qubit 0 so the
    matrix acts on little-endian basis indices.
    """
    if isinstance(obj, PauliString):
        n = obj.num_qubits
        if n > _DENSE_MAX_QUBITS:
            raise ValueError(f"dense matrix limited to {_DENSE_MAX_QUBITS} qubits, got {n}")
        out = np.array([[1.0 + 0j]])
        for q in range(n - 1, -1, -1):
            out = np.kron(out, _PAULI_MATS[obj.codes[q]])
        return out
    n = obj.num_qubits
    if n > _DENSE_MAX_QUBITS:
        raise ValueError(f"dense matrix limited to {_DENSE_MAX_QUBITS} qubits, got {n}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, p in obj.terms:
        out += coeff * dense_matrix(p)
    return out


def ground_energy(h):
    """Smallest eigenvalue of the dense matrix of h (N <= 12)."""
    return float(np.linalg.eigvalsh(dense_matrix(h))[0])
