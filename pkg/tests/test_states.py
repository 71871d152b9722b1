"""Pure statevector backend against dense linear-algebra oracles."""

from __future__ import annotations

import numpy as np
import pytest

from clqnn import PureState, rotation_matrix
from clqnn.states import MAX_QUBITS, axis_index, axis_name

from oracles import cnot_matrix, cz_matrix, embed_1q, rotation_oracle


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return PureState(n, v / np.linalg.norm(v))


@pytest.mark.parametrize("axis", ["x", "y", "z"])
@pytest.mark.parametrize("theta", [0.0, 0.3, -1.7, np.pi, 2.0 * np.pi])
def test_rotation_matrix_is_the_matrix_exponential(axis, theta):
    assert rotation_matrix(axis, theta) == pytest.approx(rotation_oracle(axis, theta), abs=1e-14)


def test_full_angle_convention_gives_cos_two_theta():
    # <Z> after R_X(theta)|0> pins down the exp(-i*theta*G) convention
    for theta in (0.0, 0.25, 1.1, 2.0):
        state = PureState.zero(1).apply_rotation("x", theta, 0)
        z = abs(state.amplitudes[0]) ** 2 - abs(state.amplitudes[1]) ** 2
        assert z == pytest.approx(np.cos(2.0 * theta), abs=1e-12)


@pytest.mark.parametrize("axis", [0, 1, 2])
@pytest.mark.parametrize("target", [0, 1, 2])
def test_apply_rotation_matches_dense_oracle(axis, target):
    state = random_state(3, seed=11 + target)
    expected = embed_1q(rotation_oracle(axis, 0.7), target, 3) @ state.amplitudes
    state.apply_rotation(axis, 0.7, target)
    assert state.amplitudes == pytest.approx(expected, abs=1e-12)


def test_apply_rotation_agrees_with_apply_unitary():
    a = random_state(2, seed=3)
    b = a.copy()
    a.apply_rotation("y", 0.9, 1)
    b.apply_unitary_1q(rotation_matrix("y", 0.9), 1)
    assert a.amplitudes == pytest.approx(b.amplitudes, abs=1e-14)


@pytest.mark.parametrize("pair", [(0, 1), (1, 0), (0, 2), (2, 1)])
def test_apply_cz_matches_dense_oracle(pair):
    state = random_state(3, seed=5)
    expected = cz_matrix(pair[0], pair[1], 3) @ state.amplitudes
    state.apply_cz(*pair)
    assert state.amplitudes == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("pair", [(0, 1), (1, 0), (0, 2), (2, 0)])
def test_apply_cnot_matches_dense_oracle(pair):
    state = random_state(3, seed=7)
    expected = cnot_matrix(pair[0], pair[1], 3) @ state.amplitudes
    state.apply_cnot(*pair)
    assert state.amplitudes == pytest.approx(expected, abs=1e-14)


def test_little_endian_indexing():
    # qubit 0 is the least significant bit: flipping it maps index 0 -> 1
    state = PureState.zero(2).apply_unitary_1q(np.array([[0, 1], [1, 0]]), 0)
    assert state.amplitudes[1] == pytest.approx(1.0)
    # CNOT controlled on qubit 0 targeting qubit 1 maps index 1 -> 3
    state.apply_cnot(0, 1)
    assert state.amplitudes[3] == pytest.approx(1.0)


def test_gates_preserve_norm():
    state = random_state(4, seed=19)
    state.apply_rotation("x", 0.4, 0).apply_cz(1, 3).apply_cnot(2, 0)
    assert state.norm() == pytest.approx(1.0, abs=1e-12)


def test_probabilities_and_inner():
    state = PureState.from_amplitudes([1 / np.sqrt(2), 0, 0, 1j / np.sqrt(2)])
    assert state.probabilities() == pytest.approx([0.5, 0, 0, 0.5])
    assert state.inner(state) == pytest.approx(1.0)
    other = PureState.zero(2)
    assert state.inner(other) == pytest.approx(1 / np.sqrt(2))


def test_gate_methods_chain_and_mutate_in_place():
    state = PureState.zero(1)
    returned = state.apply_rotation("x", 0.5, 0)
    assert returned is state


def test_copy_detaches_the_buffer():
    a = PureState.zero(1)
    b = a.copy()
    b.apply_rotation("x", 1.0, 0)
    assert a.amplitudes[0] == pytest.approx(1.0)


def test_axis_normalization_and_errors():
    assert axis_index("X") == axis_index("x") == 0 or axis_name(axis_index("x")) == "X"
    assert axis_name(axis_index("y")) == "Y"
    assert axis_name(axis_index(2)) == axis_name(axis_index("z"))
    with pytest.raises(ValueError):
        axis_index("w")
    with pytest.raises(ValueError):
        axis_index(5)


def test_from_amplitudes_validation():
    with pytest.raises(ValueError):
        PureState.from_amplitudes([1.0, 0.0, 0.0])  # not a power of two
    with pytest.raises(ValueError):
        PureState.from_amplitudes([1.0, 1.0])  # not normalized


def test_qubit_range_checks():
    state = PureState.zero(2)
    with pytest.raises(IndexError):
        state.apply_rotation("x", 0.1, 2)
    with pytest.raises(ValueError):
        state.apply_cz(1, 1)
    with pytest.raises(ValueError):
        state.apply_cnot(0, 0)


def test_non_unitary_matrix_rejected():
    with pytest.raises(ValueError):
        PureState.zero(1).apply_unitary_1q(np.array([[1.0, 0.0], [0.0, 2.0]]), 0)


def test_register_size_limits():
    with pytest.raises(ValueError):
        PureState.zero(0)
    with pytest.raises(ValueError):
        PureState(MAX_QUBITS + 1, np.zeros(2 ** (MAX_QUBITS + 1)))
