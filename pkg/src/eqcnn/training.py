"""Cross-entropy training with ADAM and the sample-size sweep protocol.

Everything is seeded: parameter init, per-epoch shuffling and batching
all draw from one generator per run, so identical configs reproduce
bit-identical histories.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .data.container import DatasetSplit
from .embedding import caa_embed
from .model import (
    MeasurementHead,
    build_qcnn,
    loss_gradient,
    num_trainable_params,
    predict_state,
)

PROB_FLOOR = 1e-12

DEFAULT_SEEDS = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon_adam: float = 1e-8
    init_range: tuple[float, float] = (-0.1, 0.1)
    epochs: int = 50
    n_samples: int = 0  # 0 means the full train split
    batch_size: int = 4
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie strictly between 0 and 1")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.n_samples and self.batch_size > self.n_samples:
            raise ValueError(
                f"batch size {self.batch_size} exceeds n_samples {self.n_samples}"
            )
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, count: int) -> "AdamState":
        return cls(np.zeros(count), np.zeros(count), 0)


@dataclass
class RunHistory:
    """Per-epoch metrics of one training run."""

    arch: str
    head_mode: str
    train_loss: list[float]
    train_acc: list[float]
    test_acc: list[float]
    final_params: np.ndarray
    wall_time_s: float
    config: TrainConfig


def cross_entropy(dist, label) -> float:
    """-sum(label * log dist), probabilities clamped below at 1e-12."""
    dist = np.asarray(dist, dtype=np.float64)
    label = np.asarray(label, dtype=np.float64)
    if dist.shape != label.shape:
        raise ValueError(f"distribution shape {dist.shape} != label shape {label.shape}")
    return -float(np.sum(label * np.log(np.maximum(dist, PROB_FLOOR))))


def adam_step(params, grads, moment_state: AdamState,
              config: TrainConfig) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected ADAM update; pure, returns new arrays."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape:
        raise ValueError("params and grads must have equal length")
    step = moment_state.step + 1
    m = config.beta1 * moment_state.first_moment + (1.0 - config.beta1) * grads
    v = config.beta2 * moment_state.second_moment + (1.0 - config.beta2) * grads**2
    m_hat = m / (1.0 - config.beta1**step)
    v_hat = v / (1.0 - config.beta2**step)
    new_params = params - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon_adam)
    return new_params, AdamState(m, v, step)


def _accuracy(circuit, params, head, states, labels) -> float:
    if not states:
        return float("nan")
    hits = 0
    for state, label in zip(states, labels):
        probs = predict_state(circuit, params, head, state)
        hits += int(np.argmax(probs) == np.argmax(label))
    return hits / len(states)


def train(arch: str, dataset: DatasetSplit, config: TrainConfig,
          head_mode: str = "M1") -> RunHistory:
    """Train one model; deterministic given the config seed."""
    if not dataset.train:
        raise ValueError("empty training set")
    if config.n_samples and len(dataset.train) < config.n_samples:
        raise ValueError(
            f"requested {config.n_samples} training samples, "
            f"dataset holds {len(dataset.train)}"
        )
    started = time.perf_counter()
    subset = list(dataset.train[: config.n_samples]) if config.n_samples else list(dataset.train)
    if config.batch_size > len(subset):
        raise ValueError(f"batch size {config.batch_size} exceeds {len(subset)} samples")
    size = subset[0].size
    n = size.bit_length() - 1
    circuit = build_qcnn(arch, n)
    head = MeasurementHead(head_mode, i_m=n)
    rng = np.random.default_rng(config.seed)
    params = rng.uniform(config.init_range[0], config.init_range[1],
                         num_trainable_params(circuit, head))
    train_states = [caa_embed(s) for s in subset]
    train_labels = [s.label for s in subset]
    test_states = [caa_embed(s) for s in dataset.test]
    test_labels = [s.label for s in dataset.test]
    adam = AdamState.zeros(len(params))
    loss_hist: list[float] = []
    train_hist: list[float] = []
    test_hist: list[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(len(subset))
        batch_losses = []
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            grads = np.zeros(len(params))
            loss_sum = 0.0
            for k in batch:
                loss, tape = loss_gradient(circuit, params, train_states[k],
                                           head, train_labels[k])
                loss_sum += loss
                grads += tape.values
            grads /= len(batch)
            batch_losses.append(loss_sum / len(batch))
            params, adam = adam_step(params, grads, adam, config)
        loss_hist.append(float(np.mean(batch_losses)))
        train_hist.append(_accuracy(circuit, params, head, train_states, train_labels))
        test_hist.append(_accuracy(circuit, params, head, test_states, test_labels))
    return RunHistory(
        arch=arch,
        head_mode=head_mode,
        train_loss=loss_hist,
        train_acc=train_hist,
        test_acc=test_hist,
        final_params=params,
        wall_time_s=time.perf_counter() - started,
        config=config,
    )


# ---------------------------------------------------------------------------
# Sample-size sweep: N_s = 2**i * 10 with batch size 2**i, so every run
# makes ten updates per epoch; the test set never changes.

def sweep_cell_sizes(i: int) -> tuple[int, int]:
    return 10 * 2**i, 2**i


def _run_cell(job):
    variant, dataset, config = job
    arch, head_mode = variant
    history = train(arch, dataset, config, head_mode=head_mode)
    return history.test_acc[-1]


def sweep(variants, dataset: DatasetSplit, i_range, base_config: TrainConfig,
          seeds=DEFAULT_SEEDS, workers: int = 1) -> list[dict]:
    """Grid of (variant, training-set size, seed) runs.

    ``variants`` holds (arch, head_mode) pairs. Returns one row per
    run: arch, head, n_samples, batch_size, seed, test_acc.
    """
    i_range = list(i_range)
    if not i_range:
        raise ValueError("empty i-range")
    biggest = max(sweep_cell_sizes(i)[0] for i in i_range)
    if len(dataset.train) < biggest:
        raise ValueError(
            f"insufficient data: the sweep needs {biggest} training samples, "
            f"dataset holds {len(dataset.train)}"
        )
    jobs = []
    keys = []
    for arch, head_mode in variants:
        for i in i_range:
            n_samples, batch = sweep_cell_sizes(i)
            for seed in seeds:
                config = replace(base_config, n_samples=n_samples,
                                 batch_size=batch, seed=seed)
                jobs.append(((arch, head_mode), dataset, config))
                keys.append((arch, head_mode, n_samples, batch, seed))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            accs = list(pool.map(_run_cell, jobs))
    else:
        accs = [_run_cell(job) for job in jobs]
    return [
        {
            "arch": arch,
            "head": head_mode,
            "n_samples": n_samples,
            "batch_size": batch,
            "seed": seed,
            "test_acc": acc,
        }
        for (arch, head_mode, n_samples, batch, seed), acc in zip(keys, accs)
    ]


def aggregate_sweep(rows: list[dict]) -> list[dict]:
    """Mean/std/best test accuracy per (variant, training-set size)."""
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        key = (row["arch"], row["head"], row["n_samples"])
        groups.setdefault(key, []).append(row["test_acc"])
    out = []
    for (arch, head, n_samples), accs in sorted(groups.items()):
        out.append(
            {
                "arch": arch,
                "head": head,
                "n_samples": n_samples,
                "mean_test_acc": float(np.mean(accs)),
                "std_test_acc": float(np.std(accs)),
                "best_test_acc": float(np.max(accs)),
                "runs": len(accs),
            }
        )
    return out


# ---------------------------------------------------------------------------
# CSV emission (the CLI writes these to disk)

def history_to_csv(history: RunHistory) -> str:
    lines = ["epoch,train_loss,train_acc,test_acc"]
    for epoch, (loss, tr, te) in enumerate(
        zip(history.train_loss, history.train_acc, history.test_acc), start=1
    ):
        lines.append(f"{epoch},{loss!r},{tr!r},{te!r}")
    return "\n".join(lines) + "\n"


def sweep_rows_to_csv(rows: list[dict]) -> str:
    lines = ["arch,head,n_samples,batch_size,seed,test_acc"]
    for row in rows:
        lines.append(
            f"{row['arch']},{row['head']},{row['n_samples']},"
            f"{row['batch_size']},{row['seed']},{row['test_acc']!r}"
        )
    return "\n".join(lines) + "\n"


def sweep_aggregate_to_csv(aggregates: list[dict]) -> str:
    lines = ["arch,head,n_samples,mean_test_acc,std_test_acc,best_test_acc,runs"]
    for row in aggregates:
        lines.append(
            f"{row['arch']},{row['head']},{row['n_samples']},"
            f"{row['mean_test_acc']!r},{row['std_test_acc']!r},"
            f"{row['best_test_acc']!r},{row['runs']}"
        )
    return "\n".join(lines) + "\n"
