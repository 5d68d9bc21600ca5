"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs the hot workloads (circuit forward pass, loss gradient, Metropolis
sweeps) once per backend in separate processes, since the backend is
chosen at import time, and prints a comparison table.

    python benchmarks/bench_kernels.py
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _bench(fn, min_time=0.5):
    fn()  # warm up
    reps = 1
    while True:
        start = time.perf_counter()
        for _ in range(reps):
            fn()
        elapsed = time.perf_counter() - start
        if elapsed >= min_time:
            return elapsed / reps
        reps = max(reps * 2, int(reps * min_time / max(elapsed, 1e-9)))


def run_workloads() -> dict:
    from eqcnn import kernels
    from eqcnn.data.ising import MetropolisSampler
    from eqcnn.model import MeasurementHead, build_qcnn, loss_gradient, run_circuit
    from eqcnn.sim import QuantumState

    rng = np.random.default_rng(0)
    spec = build_qcnn("equiv", 4)
    head = MeasurementHead("M1", i_m=4)
    params = rng.uniform(-np.pi, np.pi, spec.num_params)
    amps = rng.normal(size=256) + 1j * rng.normal(size=256)
    amps /= np.linalg.norm(amps)
    state = QuantumState(8, amps)
    label = np.array([1.0, 0.0])

    sampler = MetropolisSampler(16, 2.0, seed=0)

    results = {
        "backend": kernels.BACKEND,
        "forward_8q": _bench(lambda: run_circuit(spec, params, state)),
        "gradient_8q": _bench(lambda: loss_gradient(spec, params, state, head, label)),
        "metropolis_100_sweeps_16x16": _bench(lambda: sampler.sweep(100)),
    }
    return results


LABELS = {
    "forward_8q": "circuit forward (8 qubits, equiv)",
    "gradient_8q": "loss gradient (8 qubits, equiv)",
    "metropolis_100_sweeps_16x16": "100 Metropolis sweeps (16x16)",
}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--single", action="store_true",
                        help="run the current backend only, print JSON")
    args = parser.parse_args()

    if args.single:
        print(json.dumps(run_workloads()))
        return 0

    rows = {}
    for backend, env_value in (("cython", None), ("python", "1")):
        env = dict(os.environ)
        env.pop("EQCNN_PURE_PYTHON", None)
        if env_value:
            env["EQCNN_PURE_PYTHON"] = env_value
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--single"],
            capture_output=True, text=True, env=env,
        )
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return 1
        payload = json.loads(proc.stdout.strip().splitlines()[-1])
        rows[payload["backend"]] = payload

    if "cython" not in rows:
        print("compiled backend unavailable; fallback timings only:")
        for key, label in LABELS.items():
            print(f"  {label:<36} {rows['python'][key] * 1e3:9.3f} ms")
        return 0

    print(f"{'workload':<38} {'cython':>12} {'python':>12} {'speedup':>9}")
    for key, label in LABELS.items():
        fast = rows["cython"][key]
        slow = rows["python"][key]
        print(f"{label:<38} {fast * 1e3:9.3f} ms {slow * 1e3:9.3f} ms "
              f"{slow / fast:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
