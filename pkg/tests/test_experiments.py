"""Toy scans, Ising training, and wine classification pipelines."""

from __future__ import annotations

import numpy as np
import pytest

from clqnn import (
    PauliString,
    PureState,
    TrainConfig,
    evaluate,
    gate_budget,
    ground_energy,
    ising_hamiltonian,
)
from clqnn.experiments.ising import ising_experiment
from clqnn.experiments.toy import (
    ScanRow,
    ToyScanConfig,
    build_ansatz,
    rows_to_csv,
    toy_loss,
    toy_scan,
)
from clqnn.experiments.wine import (
    DataError,
    WineConfig,
    build_wine_circuit,
    classification_error,
    classification_experiment,
    error_rate,
    load_wine,
    qml_grad,
    qml_loss,
    qubit_embed,
)
from clqnn.gradients import LossEvaluator
from clqnn.rng import derive_rng


# ---------------------------------------------------------------- toy scan

def test_toy_loss_is_z_on_qubit_zero():
    from clqnn import ParamCircuit, Rotation

    c = ParamCircuit(3, [Rotation("x", 0, slot=0)], [1])
    for theta in (0.0, 0.7):
        assert toy_loss(c, [theta]) == pytest.approx(np.cos(2 * theta), abs=1e-12)
    with pytest.raises(ValueError):
        toy_loss(c, [0.0], num_qubits=4)


def test_scan_config_validation():
    with pytest.raises(ValueError):
        ToyScanConfig(n_values=())
    with pytest.raises(ValueError):
        ToyScanConfig(n_values=(2,))
    with pytest.raises(ValueError):
        ToyScanConfig(n_values=(3,), rounds=0)
    with pytest.raises(ValueError):
        ToyScanConfig(n_values=(3,), ansatzes=("cl", "qaoa"))
    with pytest.raises(ValueError):
        ToyScanConfig(n_values=(3,), noise_q=1.5)
    with pytest.raises(ValueError):
        ToyScanConfig(n_values=(11,), noise_q=0.9)  # over the density limit
    with pytest.raises(ValueError):
        ToyScanConfig(n_values=(3,), init="gaussian")


def test_build_ansatz_budget_matching():
    cfg = ToyScanConfig(n_values=(4,))
    cl = build_ansatz("cl", 4, cfg)
    he = build_ansatz("he", 4, cfg)
    rnd = build_ansatz("random", 4, cfg, derive_rng(0))
    assert gate_budget(rnd) == gate_budget(cl)
    assert cl.label == "cl" and he.label == "he" and rnd.label == "random"
    with pytest.raises(ValueError):
        build_ansatz("qaoa", 4, cfg)


def test_scan_rows_are_ordered_and_complete():
    cfg = ToyScanConfig(n_values=(3, 4), ansatzes=("cl", "he"), rounds=2, seed=1)
    rows = toy_scan(cfg)
    assert [(r.n, r.ansatz) for r in rows] == [(3, "cl"), (3, "he"), (4, "cl"), (4, "he")]
    for r in rows:
        assert r.rounds == 2
        assert r.mean_f_sq >= 0.0
        assert r.mean_grad_sq is not None


def test_scan_is_deterministic_and_job_independent():
    cfg = ToyScanConfig(n_values=(3, 4), ansatzes=("cl", "random"), rounds=2, seed=7)
    serial = toy_scan(cfg)
    again = toy_scan(cfg)
    parallel = toy_scan(ToyScanConfig(n_values=(3, 4), ansatzes=("cl", "random"),
                                      rounds=2, seed=7, jobs=2))
    assert serial == again == parallel


def test_skipping_gradients_leaves_the_loss_column_alone():
    base = dict(n_values=(3,), ansatzes=("cl",), rounds=3, seed=5)
    with_grad = toy_scan(ToyScanConfig(**base))[0]
    without = toy_scan(ToyScanConfig(**base, compute_grad=False))[0]
    assert without.mean_f_sq == with_grad.mean_f_sq
    assert without.median_f_sq == with_grad.median_f_sq
    assert without.mean_grad_sq is None and with_grad.mean_grad_sq is not None


def test_noisy_scan_reports_no_gradients_and_matches_pure_at_q1():
    base = dict(n_values=(3,), ansatzes=("cl", "he"), rounds=2, seed=3)
    noisy = toy_scan(ToyScanConfig(**base, noise_q=1.0))
    pure = toy_scan(ToyScanConfig(**base))
    for nrow, prow in zip(noisy, pure):
        assert nrow.mean_grad_sq is None
        assert nrow.mean_f_sq == pytest.approx(prow.mean_f_sq, rel=1e-10)


def test_haar_local_init_changes_the_draws():
    base = dict(n_values=(3,), ansatzes=("cl",), rounds=2, seed=2)
    uniform = toy_scan(ToyScanConfig(**base))[0]
    haar = toy_scan(ToyScanConfig(**base, init="haar-local"))[0]
    assert uniform.mean_f_sq != haar.mean_f_sq


def test_rows_to_csv_blank_cells_for_missing_gradients():
    row = ScanRow(3, "cl", 2, 0.5, 0.1, 0.5, None, None, None)
    text = rows_to_csv([row])
    assert text.splitlines()[1] == "3,cl,2,0.5,0.1,0.5,,,"


# ------------------------------------------------------------------- ising

@pytest.fixture(scope="module")
def small_ising():
    cfg = TrainConfig(iterations=3, optimizer="adam", lr=0.05, seed=4, shots_per_term=20)
    return ising_experiment(3, 2, cfg, ansatz="cl")


def test_ising_result_contents(small_ising):
    res = small_ising
    assert len(res.records) == 3
    assert len(res.exact_losses) == 3
    assert res.ground_state_energy == pytest.approx(ground_energy(ising_hamiltonian(3)))
    assert res.num_qubits == 3 and res.num_blocks == 2 and res.ansatz == "cl"
    assert res.budget.n_cz == 6


def test_ising_respects_the_variational_floor(small_ising):
    floor = small_ising.ground_state_energy - 1e-9
    assert all(v >= floor for v in small_ising.exact_losses)


def test_ising_random_ansatz_is_budget_matched(small_ising):
    cfg = TrainConfig(iterations=2, optimizer="sgd", lr=0.1, seed=4, shots_per_term=10)
    rnd = ising_experiment(3, 2, cfg, ansatz="random")
    assert rnd.budget == small_ising.budget
    assert rnd.ansatz == "random"


def test_ising_runs_are_deterministic():
    cfg = TrainConfig(iterations=2, optimizer="adam", lr=0.05, seed=8, shots_per_term=10)
    a = ising_experiment(2, 1, cfg)
    b = ising_experiment(2, 1, cfg)
    assert a.records == b.records
    assert a.exact_losses == b.exact_losses


def test_ising_validation():
    cfg = TrainConfig(iterations=1, optimizer="sgd", lr=0.1, seed=0, shots_per_term=5)
    with pytest.raises(ValueError):
        ising_experiment(1, 1, cfg)
    with pytest.raises(ValueError):
        ising_experiment(3, 1, cfg, ansatz="qaoa")


# -------------------------------------------------------------------- wine

@pytest.fixture(scope="module")
def wine():
    return load_wine()


def test_wine_split_shapes_and_labels(wine):
    assert wine.train_features.shape == (58, 13)
    assert wine.test_features.shape == (58, 13)
    assert sorted(set(wine.train_labels)) == [-1, 1]
    assert int((wine.train_labels == 1).sum()) == 29
    assert int((wine.test_labels == -1).sum()) == 29
    assert wine.num_features == 13
    assert wine.class_pair == (1, 2)


def test_wine_scaling_uses_train_statistics(wine):
    assert wine.train_features.min(axis=0) == pytest.approx(np.zeros(13), abs=1e-12)
    assert wine.train_features.max(axis=0) == pytest.approx(np.full(13, np.pi), abs=1e-12)
    assert wine.test_features.min() >= 0.0
    assert wine.test_features.max() <= np.pi


def test_wine_split_is_seed_deterministic(wine):
    again = load_wine()
    assert np.array_equal(wine.train_features, again.train_features)
    other = load_wine(seed=1)
    assert not np.array_equal(wine.train_features, other.train_features)


def test_wine_other_class_pairs(wine):
    ds = load_wine(class_pair=(2, 1))
    assert ds.class_pair == (2, 1)
    assert ds.train_features.shape == (58, 13)
    with pytest.raises(ValueError):
        load_wine(class_pair=(1, 1))
    # the third cultivar has only 48 instances, short of the 58 needed
    with pytest.raises(DataError, match="class 3"):
        load_wine(class_pair=(1, 3))


def test_wine_data_errors(tmp_path):
    with pytest.raises(DataError):
        load_wine(path=str(tmp_path / "missing.csv"))
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,3\n")
    with pytest.raises(DataError, match="line 1"):
        load_wine(path=str(bad))
    short = tmp_path / "short.csv"
    rows = ["1," + ",".join(["0.5"] * 13)] * 60 + ["2," + ",".join(["0.5"] * 13)] * 3
    short.write_text("\n".join(rows) + "\n")
    with pytest.raises(DataError, match="class 2"):
        load_wine(path=str(short))


def test_wine_env_var_fallback(tmp_path, monkeypatch, wine):
    rows = (["1," + ",".join(["%g" % (0.1 * k) for k in range(1, 14)])] * 58
            + ["2," + ",".join(["1.0"] * 13)] * 58)
    data = tmp_path / "env.csv"
    data.write_text("\n".join(rows) + "\n")
    monkeypatch.setenv("WINE_DATA", str(data))
    ds = load_wine()
    assert ds.train_features.shape == (58, 13)
    # constant columns scale to zero, not NaN
    assert np.isfinite(ds.train_features).all()


def test_qubit_embed_is_a_product_of_y_rotations():
    state = qubit_embed([np.pi / 2, 0.0])
    # R_Y(pi/2)|0> = |1>, so the register reads |01> in little-endian
    assert abs(state.amplitudes[1]) == pytest.approx(1.0, abs=1e-12)
    x = np.array([0.3, 1.2, 2.0])
    expected = np.array([1.0 + 0j])
    for angle in x:  # little-endian: later qubits occupy higher kron factors
        expected = np.kron([np.cos(angle), np.sin(angle)], expected)
    assert qubit_embed(x).amplitudes == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError):
        qubit_embed([])


def test_qml_loss_exact_value():
    c = build_wine_circuit("he", 2, WineConfig(he_layers=1))
    theta = np.zeros(c.param_count)
    x = np.array([0.2, 1.0])
    sigma = PauliString.from_text("ZI")
    f = evaluate(LossEvaluator(c, sigma, qubit_embed(x)), theta)
    assert qml_loss(c, theta, [(x, 1)]) == pytest.approx(abs(f - 1.0), abs=1e-12)
    assert qml_loss(c, theta, [(x, 1), (x, -1)]) == pytest.approx(
        (abs(f - 1) + abs(f + 1)) / 2.0, abs=1e-12)
    with pytest.raises(ValueError):
        qml_loss(c, theta, [])


def test_qml_grad_matches_finite_differences():
    c = build_wine_circuit("he", 2, WineConfig(he_layers=1))
    rng = np.random.default_rng(14)
    theta = rng.uniform(0, 2 * np.pi, c.param_count)
    batch = [(rng.uniform(0, np.pi, 2), 1), (rng.uniform(0, np.pi, 2), -1)]
    grad = qml_grad(c, theta, batch)
    h = 1e-6
    fd = np.zeros_like(theta)
    for j in range(len(theta)):
        up, down = theta.copy(), theta.copy()
        up[j] += h
        down[j] -= h
        fd[j] = (qml_loss(c, up, batch) - qml_loss(c, down, batch)) / (2 * h)
    assert grad == pytest.approx(fd, abs=1e-4)


def test_qml_grad_uses_the_zero_subgradient_at_the_kink():
    # theta = 0 leaves the embedded |00> state fixed, so <Z_0> equals the
    # +1 label exactly and the sign convention must return a zero gradient
    c = build_wine_circuit("he", 2, WineConfig(he_layers=1))
    theta = np.zeros(c.param_count)
    batch = [(np.zeros(2), 1)]
    assert qml_loss(c, theta, batch) == 0.0
    assert np.array_equal(qml_grad(c, theta, batch), np.zeros(c.param_count))


def test_qml_shot_mode_is_stream_deterministic():
    c = build_wine_circuit("he", 2, WineConfig(he_layers=1))
    rng = np.random.default_rng(15)
    theta = rng.uniform(0, 2 * np.pi, c.param_count)
    batch = [(np.array([0.4, 2.2]), 1), (np.array([1.0, 0.1]), -1)]
    assert qml_loss(c, theta, batch, shots=25, rng=9) == qml_loss(
        c, theta, batch, shots=25, rng=9)
    a = qml_grad(c, theta, batch, shots=25, rng=9)
    assert np.array_equal(a, qml_grad(c, theta, batch, shots=25, rng=9))
    assert not np.array_equal(a, qml_grad(c, theta, batch, shots=25, rng=10))


def test_error_rate_counts_undecided_predictions_as_errors():
    assert error_rate([0.5, -0.5], [1, -1]) == 0.0
    assert error_rate([0.5, -0.5], [-1, 1]) == 1.0
    assert error_rate([0.0], [1]) == 1.0
    assert error_rate([0.0], [-1]) == 1.0
    with pytest.raises(ValueError):
        error_rate([0.1, 0.2], [1])


def test_error_rate_is_invariant_under_positive_rescaling():
    rng = np.random.default_rng(16)
    values = np.append(rng.standard_normal(20), 0.0)
    labels = np.where(rng.standard_normal(21) > 0, 1, -1)
    base = error_rate(values, labels)
    for c in (0.1, 3.0, 1e6):
        assert error_rate(values * c, labels) == base


def test_classification_error_exact_predictions():
    c = build_wine_circuit("he", 2, WineConfig(he_layers=1))
    theta = np.zeros(c.param_count)
    feats = [np.zeros(2), np.array([np.pi, 0.0])]
    vals = [evaluate(LossEvaluator(c, PauliString.from_text("ZI"), qubit_embed(x)), theta)
            for x in feats]
    expected = error_rate(vals, [1, -1])
    assert classification_error(c, theta, feats, [1, -1]) == expected


def test_wine_circuit_budgets():
    cfg = WineConfig()
    cl = build_wine_circuit("cl", 13, cfg)
    he = build_wine_circuit("he", 13, cfg)
    rnd = build_wine_circuit("random", 13, cfg)
    assert cl.param_count == 366
    assert he.param_count == 390
    assert gate_budget(rnd) == gate_budget(cl)
    with pytest.raises(ValueError):
        build_wine_circuit("qaoa", 13, cfg)


def test_classification_experiment_probe_run(wine):
    cfg = WineConfig(iterations=2, shots=3, batch_size=2, seed=6)
    res = classification_experiment("cl", cfg, dataset=wine)
    assert len(res.records) == 2
    assert res.train_size == 58 and res.test_size == 58
    assert res.final_train_loss == res.records[-1].loss
    assert res.final_test_error == res.records[-1].test_error
    assert 0.0 <= res.final_test_error <= 1.0
    again = classification_experiment("cl", cfg, dataset=wine)
    assert res.records == again.records


def test_classification_experiment_validates_batch_size(wine):
    with pytest.raises(ValueError):
        classification_experiment("cl", WineConfig(batch_size=59), dataset=wine)
