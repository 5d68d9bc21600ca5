import numpy as np
import pytest

from conftest import random_state_amps
from eqcnn.data import ising_dataset
from eqcnn.model import MeasurementHead, build_qcnn, loss_gradient
from eqcnn.sim import QuantumState
from eqcnn.training import (
    AdamState,
    TrainConfig,
    adam_step,
    aggregate_sweep,
    cross_entropy,
    history_to_csv,
    sweep,
    sweep_cell_sizes,
    train,
)
from oracles import finite_difference_grad, grads_close


@pytest.fixture(scope="module")
def tiny_ising():
    # 4x4 lattices embed into 4 qubits: fast enough for training tests
    return ising_dataset(12, seed=0, n_test_per_class=15, lattice_size=4, sweeps=300)


def test_cross_entropy_values():
    assert cross_entropy([1.0, 0.0], [1.0, 0.0]) == 0.0
    assert np.isclose(cross_entropy([0.5, 0.5], [0.0, 1.0]), np.log(2))
    assert np.isclose(cross_entropy([1e-15, 1.0], [1.0, 0.0]), -np.log(1e-12))


def test_cross_entropy_length_mismatch():
    with pytest.raises(ValueError):
        cross_entropy([1.0, 0.0], [1.0, 0.0, 0.0])


def test_adam_zero_gradient_keeps_params():
    config = TrainConfig()
    params = np.array([0.3, -0.7])
    out, state = adam_step(params, np.zeros(2), AdamState.zeros(2), config)
    assert np.array_equal(out, params)
    assert state.step == 1


def test_adam_first_step_closed_form():
    # bias correction makes m_hat = g and v_hat = g^2 on step one
    config = TrainConfig(learning_rate=0.01)
    params = np.array([0.0])
    grads = np.array([1.0])
    out, _ = adam_step(params, grads, AdamState.zeros(1), config)
    expected = -0.01 * 1.0 / (1.0 + config.epsilon_adam)
    assert np.isclose(out[0], expected, rtol=1e-12)
    assert np.isclose(out[0], -0.01, atol=1e-6)


def test_adam_two_identical_steps_monotone():
    config = TrainConfig(learning_rate=0.01)
    params = np.array([1.0])
    grads = np.array([0.5])
    state = AdamState.zeros(1)
    p1, state = adam_step(params, grads, state, config)
    p2, state = adam_step(p1, grads, state, config)
    assert p1[0] < params[0]
    assert p2[0] < p1[0]


def test_adam_length_mismatch():
    with pytest.raises(ValueError):
        adam_step(np.zeros(2), np.zeros(3), AdamState.zeros(2), TrainConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(beta1=1.0)
    with pytest.raises(ValueError):
        TrainConfig(n_samples=4, batch_size=8)
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)


def test_train_zero_lr_keeps_initial_params(tiny_ising):
    config = TrainConfig(learning_rate=0.0, epochs=1, n_samples=8, batch_size=2, seed=3)
    history = train("equiv", tiny_ising, config)
    rng = np.random.default_rng(3)
    expected = rng.uniform(-0.1, 0.1, len(history.final_params))
    assert np.array_equal(history.final_params, expected)


def test_train_deterministic(tiny_ising):
    config = TrainConfig(epochs=3, n_samples=8, batch_size=2, seed=1)
    a = train("appr_equiv", tiny_ising, config, head_mode="M2")
    b = train("appr_equiv", tiny_ising, config, head_mode="M2")
    assert a.train_loss == b.train_loss
    assert a.train_acc == b.train_acc
    assert a.test_acc == b.test_acc
    assert np.array_equal(a.final_params, b.final_params)


def test_train_history_lengths(tiny_ising):
    config = TrainConfig(epochs=4, n_samples=8, batch_size=2, seed=0)
    history = train("nonequiv", tiny_ising, config)
    assert len(history.train_loss) == 4
    assert len(history.train_acc) == 4
    assert len(history.test_acc) == 4
    assert all(np.isfinite(v) for v in history.train_loss)


def test_train_loss_trend_smoke(tiny_ising):
    # fixed-seed smoke check: the 10-epoch moving average of the batch
    # loss never increases over the run
    config = TrainConfig(epochs=30, n_samples=24, batch_size=4, seed=0)
    history = train("equiv", tiny_ising, config)
    losses = np.array(history.train_loss)
    assert np.all(np.isfinite(losses))
    moving = np.convolve(losses, np.ones(10) / 10, mode="valid")
    assert np.all(np.diff(moving) <= 0)


def test_sweep_worker_pool_matches_serial(tiny_ising):
    base = TrainConfig(epochs=1)
    serial = sweep([("equiv", "M1")], tiny_ising, [0], base, seeds=(0, 1), workers=1)
    pooled = sweep([("equiv", "M1")], tiny_ising, [0], base, seeds=(0, 1), workers=2)
    assert serial == pooled


def test_train_empty_dataset_rejected(tiny_ising):
    from eqcnn.data import DatasetSplit

    with pytest.raises(ValueError):
        train("equiv", DatasetSplit([], []), TrainConfig())
    with pytest.raises(ValueError):
        train("equiv", tiny_ising, TrainConfig(n_samples=10_000))


def test_gradient_step_decreases_loss_on_average(rng):
    # 20 random small instances, one ADAM step at lr 1e-3: the mean loss
    # delta over instances must be negative
    spec = build_qcnn("equiv", 2)
    head = MeasurementHead("M1", i_m=2)
    config = TrainConfig(learning_rate=1e-3)
    deltas = []
    for _ in range(20):
        params = rng.uniform(-np.pi, np.pi, spec.num_params)
        state = QuantumState(4, random_state_amps(rng, 4))
        label = np.array([1.0, 0.0]) if rng.random() < 0.5 else np.array([0.0, 1.0])
        before, tape = loss_gradient(spec, params, state, head, label)
        stepped, _ = adam_step(params, tape.values, AdamState.zeros(len(params)), config)
        after, _ = loss_gradient(spec, stepped, state, head, label)
        deltas.append(after - before)
    assert np.mean(deltas) < 0


def test_shared_parameter_gradients_on_real_architecture(rng):
    # the mirrored builds reuse parameters across slots; finite
    # differences must still agree parameter-wise
    ds_rng = np.random.default_rng(7)
    spec = build_qcnn("appr_equiv", 2)
    head = MeasurementHead("M1", i_m=2)
    params = rng.uniform(-0.5, 0.5, spec.num_params)
    state = QuantumState(4, random_state_amps(rng, 4))
    label = np.array([0.0, 1.0])
    _, tape = loss_gradient(spec, params, state, head, label)

    def loss_at(p):
        value, _ = loss_gradient(spec, p, state, head, label)
        return value

    ref = finite_difference_grad(loss_at, params)
    assert grads_close(tape.values, ref)


def test_sweep_cell_sizes_rule():
    assert sweep_cell_sizes(1) == (20, 2)
    assert sweep_cell_sizes(10) == (10240, 1024)


def test_sweep_rows_and_aggregate(tiny_ising):
    base = TrainConfig(epochs=2)
    rows = sweep([("equiv", "M1")], tiny_ising, [1], base, seeds=(0, 1, 2, 3, 4))
    assert len(rows) == 5
    assert all(row["n_samples"] == 20 and row["batch_size"] == 2 for row in rows)
    assert [row["seed"] for row in rows] == [0, 1, 2, 3, 4]
    aggs = aggregate_sweep(rows)
    assert len(aggs) == 1
    agg = aggs[0]
    assert agg["runs"] == 5
    accs = [row["test_acc"] for row in rows]
    assert np.isclose(agg["mean_test_acc"], np.mean(accs))
    assert np.isclose(agg["std_test_acc"], np.std(accs))
    assert np.isclose(agg["best_test_acc"], np.max(accs))


def test_sweep_validations(tiny_ising):
    base = TrainConfig(epochs=1)
    with pytest.raises(ValueError, match="empty i-range"):
        sweep([("equiv", "M1")], tiny_ising, [], base)
    with pytest.raises(ValueError, match="insufficient data"):
        sweep([("equiv", "M1")], tiny_ising, [5], base)


def test_history_csv_shape(tiny_ising):
    config = TrainConfig(epochs=2, n_samples=8, batch_size=2, seed=0)
    history = train("equiv", tiny_ising, config)
    csv = history_to_csv(history)
    lines = csv.strip().split("\n")
    assert lines[0] == "epoch,train_loss,train_acc,test_acc"
    assert len(lines) == 3
    assert lines[1].startswith("1,")
