"""Simulation lab for controlled-layer quantum neural networks.

Dense statevector and density-matrix simulation of layered parameterized
circuits, exact parameter-shift gradients, shot-noise measurement
estimation, numerical verification of trainability lower bounds, and
desk-scale training experiments (Ising ground state, binary
classification), all reproducible bit-for-bit from explicit seeds.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .states import MAX_QUBITS, PureState, rotation_matrix
from .observables import (
    Hamiltonian,
    PauliString,
    dense_matrix,
    expectation_exact,
    expectation_hamiltonian,
    expectation_shots,
    ground_energy,
    ising_hamiltonian,
    three_bar,
    three_bar_two,
)
from .circuits import (
    CNOT,
    CZ,
    GateBudget,
    HardwareEfficient,
    ParamCircuit,
    Rotation,
    TensorRotations,
    build_cl_qnn,
    build_he_ansatz,
    build_random_qnn,
    circuit_from_json,
    circuit_to_json,
    gate_budget,
    haar_local_angles,
    haar_random_unitary,
    init_haar_local,
    init_uniform,
    ring_pairs,
    rotation_depth,
    run,
    xyx_angles,
)
from .gradients import (
    LossEvaluator,
    ShotMode,
    evaluate,
    finite_diff_grad,
    grad_and_value,
    grad_norm_sq,
    param_shift_grad,
)
from .density import MixedState, depolarize_qubit, expectation_mixed, run_noisy
from .theory import (
    BoundReport,
    CommutantSplit,
    bloch_sample,
    commutant_split,
    lemma2_check,
    lemma3_check,
    mc_expected_f_sq,
    mc_expected_grad_norm_sq,
    theorem1_bound,
    theorem2_bound,
)
from .optim import (
    AdamState,
    RunRecord,
    TrainConfig,
    adam_step,
    records_to_csv,
    sgd_step,
    train,
)
from .rng import as_rng, derive_rng, derive_seed

__all__ = [
    "MAX_QUBITS", "PureState", "rotation_matrix", "Hamiltonian", "PauliString",
    "dense_matrix", "expectation_exact", "expectation_hamiltonian",
    "expectation_shots", "ground_energy", "ising_hamiltonian", "three_bar",
    "three_bar_two", "CNOT", "CZ", "GateBudget", "HardwareEfficient",
    "ParamCircuit", "Rotation", "TensorRotations", "build_cl_qnn",
    "build_he_ansatz", "build_random_qnn", "circuit_from_json",
    "circuit_to_json", "gate_budget", "haar_local_angles",
    "haar_random_unitary", "init_haar_local", "init_uniform", "ring_pairs",
    "rotation_depth", "run", "xyx_angles", "LossEvaluator", "ShotMode", "evaluate",
    "finite_diff_grad", "grad_and_value", "grad_norm_sq", "param_shift_grad",
    "MixedState", "depolarize_qubit", "expectation_mixed", "run_noisy",
    "BoundReport", "CommutantSplit", "bloch_sample", "commutant_split",
    "lemma2_check", "lemma3_check", "mc_expected_f_sq",
    "mc_expected_grad_norm_sq", "theorem1_bound", "theorem2_bound",
    "AdamState", "RunRecord", "TrainConfig", "adam_step", "records_to_csv",
    "sgd_step", "train", "as_rng", "derive_rng", "derive_seed",
    "__version__",
]
