"""Command-line entry point.

Subcommands: gen-ising, train, sweep, audit, twirl. Options resolve as
flags > config file > defaults, where the config file is flat
``key = value`` text; every run echoes its effective configuration to
a file that can be fed back through --config to reproduce it.

Exit codes: 0 success, 1 failed equivariance audit (informational),
2 usage or configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import training
from .data import container, ising, mnist
from .embedding import ImageSample, apply_group_to_image
from .model import MeasurementHead, build_qcnn, predict
from .pauli import parse_pauli_word
from .symmetry import (
    audit_circuit,
    enumerate_equivariant_gateset,
    group_elements,
    is_equivariant_generator,
    subgroup_actions,
    twirl,
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Option resolution: flags > config file > defaults

def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _flag(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def read_config_file(path, allowed: set[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not key:
            raise ConfigError(f"{path}:{lineno}: missing key")
        if key not in allowed:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def resolve_options(args, spec: dict[str, tuple]) -> dict:
    """spec maps key -> (default, converter); returns effective values."""
    config = {}
    if getattr(args, "config", None):
        config = read_config_file(args.config, allowed=set(spec))
    out = {}
    for key, (default, conv) in spec.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            out[key] = flag_value
        elif key in config:
            try:
                out[key] = conv(config[key])
            except ValueError as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from exc
        else:
            out[key] = default
    return out


def format_config(values: dict) -> str:
    lines = []
    for key in sorted(values):
        value = values[key]
        if value is None:
            continue
        if isinstance(value, (tuple, list)):
            value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# Shared dataset construction

_DATASET_KEYS = {
    "dataset": ("ising", str),
    "data": (None, str),
    "data_seed": (0, int),
    "lattice_size": (16, int),
    "sweeps": (2000, int),
    "temps_ordered": (ising.DEFAULT_TEMPS_ORDERED, _floats),
    "temps_disordered": (ising.DEFAULT_TEMPS_DISORDERED, _floats),
    "n_test_per_class": (100, int),
    "mnist_train_images": (None, str),
    "mnist_train_labels": (None, str),
    "mnist_test_images": (None, str),
    "mnist_test_labels": (None, str),
}


def _build_dataset(opts, n_train_samples: int) -> container.DatasetSplit:
    if opts["data"]:
        return container.load_dataset(opts["data"])
    if opts["dataset"] == "ising":
        n_per_class = max(1, (n_train_samples + 1) // 2)
        return ising.ising_dataset(
            n_per_class,
            temps_ordered=opts["temps_ordered"],
            temps_disordered=opts["temps_disordered"],
            seed=opts["data_seed"],
            n_test_per_class=opts["n_test_per_class"],
            lattice_size=opts["lattice_size"],
            sweeps=opts["sweeps"],
        )
    if opts["dataset"] == "mnist":
        paths = [opts[k] for k in ("mnist_train_images", "mnist_train_labels",
                                   "mnist_test_images", "mnist_test_labels")]
        if any(p is None for p in paths):
            raise ConfigError(
                "dataset mnist needs --mnist-train-images, --mnist-train-labels, "
                "--mnist-test-images and --mnist-test-labels"
            )
        return mnist.mnist_task_dataset(
            *paths, seed=opts["data_seed"], n_test_per_class=opts["n_test_per_class"]
        )
    raise ConfigError(f"unknown dataset {opts['dataset']!r}; expected ising or mnist")


# ---------------------------------------------------------------------------
# gen-ising

_GEN_KEYS = {
    "n_per_class": (20, int),
    "n_test_per_class": (100, int),
    "seed": (0, int),
    "lattice_size": (16, int),
    "sweeps": (2000, int),
    "temps_ordered": (ising.DEFAULT_TEMPS_ORDERED, _floats),
    "temps_disordered": (ising.DEFAULT_TEMPS_DISORDERED, _floats),
    "out": (None, str),
}


def cmd_gen_ising(args) -> int:
    opts = resolve_options(args, _GEN_KEYS)
    if not opts["out"]:
        raise ConfigError("gen-ising needs --out")
    split = ising.ising_dataset(
        opts["n_per_class"],
        temps_ordered=opts["temps_ordered"],
        temps_disordered=opts["temps_disordered"],
        seed=opts["seed"],
        n_test_per_class=opts["n_test_per_class"],
        lattice_size=opts["lattice_size"],
        sweeps=opts["sweeps"],
    )
    out = Path(opts["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    container.save_dataset(split, out)
    print(f"wrote {out} ({len(split.train)} train / {len(split.test)} test samples)")
    _write(out.with_name(out.name + ".meta.csv"), container.metadata_csv(split))
    _write(out.with_name(out.name + ".config"), format_config(opts))
    return 0


# ---------------------------------------------------------------------------
# train

_TRAIN_KEYS = {
    "arch": ("equiv", str),
    "head": ("M1", str),
    "ns": (40, int),
    "epochs": (50, int),
    "batch_size": (None, int),
    "lr": (0.01, float),
    "beta1": (0.5, float),
    "beta2": (0.999, float),
    "epsilon_adam": (1e-8, float),
    "seed": (0, int),
    "out_dir": ("runs/train", str),
    **_DATASET_KEYS,
}


def _check_variant(arch: str, head: str):
    if arch not in ("equiv", "appr_equiv", "nonequiv"):
        raise ConfigError(f"unknown architecture {arch!r}")
    if head not in ("M1", "M2"):
        raise ConfigError(f"unknown head mode {head!r}")
    if arch == "nonequiv" and head == "M2":
        print(
            "warning: head M2 trains a symmetry-breaking phase; with the "
            "non-equivariant circuit the invariance bound carries no meaning",
            file=sys.stderr,
        )


def _train_config(opts) -> training.TrainConfig:
    batch = opts["batch_size"]
    if batch is None:
        # Keep ten updates per epoch, the batch rule of the sweep.
        batch = max(1, opts["ns"] // 10) if opts["ns"] else 1
    return training.TrainConfig(
        learning_rate=opts["lr"],
        beta1=opts["beta1"],
        beta2=opts["beta2"],
        epsilon_adam=opts["epsilon_adam"],
        epochs=opts["epochs"],
        n_samples=opts["ns"],
        batch_size=batch,
        seed=opts["seed"],
    )


def cmd_train(args) -> int:
    opts = resolve_options(args, _TRAIN_KEYS)
    _check_variant(opts["arch"], opts["head"])
    config = _train_config(opts)
    opts["batch_size"] = config.batch_size
    dataset = _build_dataset(opts, config.n_samples)
    history = training.train(opts["arch"], dataset, config, head_mode=opts["head"])
    out_dir = Path(opts["out_dir"])
    _write(out_dir / "metrics.csv", training.history_to_csv(history))
    payload = {
        "arch": history.arch,
        "head": history.head_mode,
        "epochs": config.epochs,
        "final_params": [float(v) for v in history.final_params],
        "final_test_acc": history.test_acc[-1],
    }
    _write(out_dir / "params.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write(out_dir / "config_echo.cfg", format_config(opts))
    print(
        f"{history.arch}/{history.head_mode}: "
        f"final train_acc {history.train_acc[-1]:.3f}, "
        f"test_acc {history.test_acc[-1]:.3f}, "
        f"{history.wall_time_s:.1f}s"
    )
    return 0


# ---------------------------------------------------------------------------
# sweep

_SWEEP_KEYS = {
    "archs": ("equiv,appr_equiv:M1,appr_equiv:M2,nonequiv", str),
    "i_min": (1, int),
    "i_max": (2, int),
    "n_seeds": (5, int),
    "epochs": (50, int),
    "lr": (0.01, float),
    "beta1": (0.5, float),
    "beta2": (0.999, float),
    "epsilon_adam": (1e-8, float),
    "workers": (max(1, os.cpu_count() or 1), int),
    "out_dir": ("runs/sweep", str),
    **_DATASET_KEYS,
}


def _parse_variants(text: str) -> list[tuple[str, str]]:
    variants = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        arch, _, head = chunk.partition(":")
        head = head or "M1"
        _check_variant(arch, head)
        variants.append((arch, head))
    if not variants:
        raise ConfigError("no architectures given")
    return variants


def cmd_sweep(args) -> int:
    opts = resolve_options(args, _SWEEP_KEYS)
    variants = _parse_variants(opts["archs"])
    i_range = list(range(opts["i_min"], opts["i_max"] + 1))
    if not i_range:
        raise ConfigError(f"empty i-range: i_min={opts['i_min']} > i_max={opts['i_max']}")
    max_ns = training.sweep_cell_sizes(max(i_range))[0]
    dataset = _build_dataset(opts, max_ns)
    base = training.TrainConfig(
        learning_rate=opts["lr"],
        beta1=opts["beta1"],
        beta2=opts["beta2"],
        epsilon_adam=opts["epsilon_adam"],
        epochs=opts["epochs"],
    )
    seeds = tuple(range(opts["n_seeds"]))
    rows = training.sweep(variants, dataset, i_range, base, seeds=seeds,
                          workers=opts["workers"])
    out_dir = Path(opts["out_dir"])
    _write(out_dir / "sweep_rows.csv", training.sweep_rows_to_csv(rows))
    aggregates = training.aggregate_sweep(rows)
    _write(out_dir / "sweep_aggregate.csv", training.sweep_aggregate_to_csv(aggregates))
    _write(out_dir / "config_echo.cfg", format_config(opts))
    return 0


# ---------------------------------------------------------------------------
# audit

def cmd_audit(args) -> int:
    arch = args.arch or "equiv"
    n = args.n or 4
    _check_variant(arch, "M1")
    circuit = build_qcnn(arch, n)
    freeze = circuit.bridge_params if args.freeze_bridge else ()
    report = audit_circuit(circuit, n, num_param_sets=args.trials, seed=args.seed,
                           freeze_slots=freeze)
    print(f"equivariance audit: arch={arch} n={n} "
          f"({circuit.num_params} params{', bridge frozen' if freeze else ''})")
    print(report.format_table())

    rng = np.random.default_rng(args.seed + 1)
    head = MeasurementHead("M1", i_m=n)
    params = rng.uniform(-np.pi, np.pi, circuit.num_params)
    for idx in freeze:
        params[idx] = 0.0
    size = 1 << n
    worst = 0.0
    for _ in range(5):
        image = ImageSample(rng.normal(size=(size, size)), np.array([1.0, 0.0]))
        base = predict(circuit, params, head, image)
        for g, _ in group_elements(n):
            moved = predict(circuit, params, head, apply_group_to_image(image, g))
            worst = max(worst, float(np.max(np.abs(moved - base))))
    print(f"prediction-invariance max deviation (M1 head): {worst:.3e}")
    if not report.equivariant:
        print(f"audit FAILED for: {', '.join(report.failing())}")
        return 1
    print("audit passed: all 8 elements below tolerance")
    return 0


# ---------------------------------------------------------------------------
# twirl

def cmd_twirl(args) -> int:
    n = args.n
    if args.enumerate_support:
        support = [int(q) for q in args.enumerate_support.split(",") if q.strip()]
        if n is None:
            n = max(support) + 1 if support else 1
        words = enumerate_equivariant_gateset(support, n, args.max_weight)
        print(f"equivariant gateset on support {support} (n={n}, "
              f"weight <= {args.max_weight}): {len(words)} words")
        for word in words:
            print(f"  {word}")
        return 0
    if not args.word:
        raise ConfigError("twirl needs a Pauli word or --enumerate-support")
    word = parse_pauli_word(args.word)
    if n is None:
        n = (max(word.support) + 1) if word.support else 1
    actions = subgroup_actions(args.group, n)
    terms = twirl(word, actions)
    print(f"twirl of {word} over {args.group} (n={n}):")
    if not terms:
        print("  0")
    else:
        for coeff, term in terms:
            print(f"  {term} (coefficient {coeff:g})")
    verdict = is_equivariant_generator(word, n)
    print(f"commutes with both register X layers: {'yes' if verdict else 'no'}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqcnn",
        description="p4m-equivariant QCNNs on an exact statevector simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-ising", help="generate an Ising dataset (EQDS container)")
    gen.add_argument("--config")
    gen.add_argument("--n-per-class", dest="n_per_class", type=int)
    gen.add_argument("--n-test-per-class", dest="n_test_per_class", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--lattice-size", dest="lattice_size", type=int)
    gen.add_argument("--sweeps", type=int)
    gen.add_argument("--temps-ordered", dest="temps_ordered", type=_floats)
    gen.add_argument("--temps-disordered", dest="temps_disordered", type=_floats)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen_ising)

    def add_dataset_flags(p):
        p.add_argument("--dataset", choices=("ising", "mnist"))
        p.add_argument("--data", help="load an EQDS container instead of generating")
        p.add_argument("--data-seed", dest="data_seed", type=int)
        p.add_argument("--lattice-size", dest="lattice_size", type=int)
        p.add_argument("--sweeps", type=int)
        p.add_argument("--temps-ordered", dest="temps_ordered", type=_floats)
        p.add_argument("--temps-disordered", dest="temps_disordered", type=_floats)
        p.add_argument("--n-test-per-class", dest="n_test_per_class", type=int)
        p.add_argument("--mnist-train-images", dest="mnist_train_images")
        p.add_argument("--mnist-train-labels", dest="mnist_train_labels")
        p.add_argument("--mnist-test-images", dest="mnist_test_images")
        p.add_argument("--mnist-test-labels", dest="mnist_test_labels")

    tr = sub.add_parser("train", help="train one model and emit metrics")
    tr.add_argument("--config")
    tr.add_argument("--arch", choices=("equiv", "appr_equiv", "nonequiv"))
    tr.add_argument("--head", choices=("M1", "M2"))
    tr.add_argument("--ns", type=int, help="training samples (0 = full split)")
    tr.add_argument("--epochs", type=int)
    tr.add_argument("--batch-size", dest="batch_size", type=int)
    tr.add_argument("--lr", type=float)
    tr.add_argument("--beta1", type=float)
    tr.add_argument("--beta2", type=float)
    tr.add_argument("--epsilon-adam", dest="epsilon_adam", type=float)
    tr.add_argument("--seed", type=int)
    tr.add_argument("--out-dir", dest="out_dir")
    add_dataset_flags(tr)
    tr.set_defaults(func=cmd_train)

    sw = sub.add_parser("sweep", help="sample-size sweep over architectures and seeds")
    sw.add_argument("--config")
    sw.add_argument("--archs", help="comma list, e.g. equiv,appr_equiv:M2,nonequiv")
    sw.add_argument("--i-min", dest="i_min", type=int)
    sw.add_argument("--i-max", dest="i_max", type=int)
    sw.add_argument("--n-seeds", dest="n_seeds", type=int)
    sw.add_argument("--epochs", type=int)
    sw.add_argument("--lr", type=float)
    sw.add_argument("--beta1", type=float)
    sw.add_argument("--beta2", type=float)
    sw.add_argument("--epsilon-adam", dest="epsilon_adam", type=float)
    sw.add_argument("--workers", type=int)
    sw.add_argument("--out-dir", dest="out_dir")
    add_dataset_flags(sw)
    sw.set_defaults(func=cmd_sweep)

    au = sub.add_parser("audit", help="numerical equivariance audit of an architecture")
    au.add_argument("--arch", choices=("equiv", "appr_equiv", "nonequiv"))
    au.add_argument("--n", type=int)
    au.add_argument("--freeze-bridge", dest="freeze_bridge", action="store_true")
    au.add_argument("--trials", type=int, default=20)
    au.add_argument("--seed", type=int, default=7)
    au.set_defaults(func=cmd_audit)

    tw = sub.add_parser("twirl", help="symbolic twirl of a Pauli word")
    tw.add_argument("word", nargs="?", help="e.g. Y0Y1 or -Z2")
    tw.add_argument("--group", default="full",
                    choices=("x-flip", "y-flip", "flips", "rotations", "full"))
    tw.add_argument("--n", type=int, help="register size (default: fits the word)")
    tw.add_argument("--enumerate-support", dest="enumerate_support",
                    help="comma list of qubits: print the equivariant gateset instead")
    tw.add_argument("--max-weight", dest="max_weight", type=int, default=4)
    tw.set_defaults(func=cmd_twirl)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
