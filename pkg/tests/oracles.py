"""Independent dense-matrix oracles used across the test suite.

Everything here is built from numpy kron/matmul only, so the checks
stay independent of the kernel-based simulation paths they verify.
"""

from __future__ import annotations

import numpy as np

from eqcnn.pauli import SignedPauliString
from eqcnn.sim import GateOp, Hadamard, PauliRotation, PauliX, PhaseRotation, Swap

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

HADAMARD_1Q = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def dense_word(word: SignedPauliString, num_qubits: int) -> np.ndarray:
    """Kronecker build of a signed Pauli word, qubit 0 leftmost."""
    out = np.array([[word.sign]], dtype=complex)
    for q in range(num_qubits):
        out = np.kron(out, PAULI_1Q[word.letter(q) or "I"])
    return out


def embed_one_qubit(mat: np.ndarray, qubit: int, num_qubits: int) -> np.ndarray:
    out = np.array([[1.0]], dtype=complex)
    for q in range(num_qubits):
        out = np.kron(out, mat if q == qubit else PAULI_1Q["I"])
    return out


def dense_gate(gate: GateOp, num_qubits: int, angle=None) -> np.ndarray:
    """Dense unitary of a single gate (cos/sin closed form, no simulator)."""
    dim = 1 << num_qubits
    if isinstance(gate, PauliRotation):
        theta = gate.angle if angle is None else angle
        word = dense_word(gate.generator, num_qubits)
        return np.cos(theta) * np.eye(dim) - 1j * np.sin(theta) * word
    if isinstance(gate, PhaseRotation):
        phi = gate.angle if angle is None else angle
        word = dense_word(SignedPauliString.from_map({gate.qubit: "Z"}), num_qubits)
        return np.cos(phi) * np.eye(dim) - 1j * np.sin(phi) * word
    if isinstance(gate, Hadamard):
        return embed_one_qubit(HADAMARD_1Q, gate.qubit, num_qubits)
    if isinstance(gate, PauliX):
        return embed_one_qubit(PAULI_1Q["X"], gate.qubit, num_qubits)
    if isinstance(gate, Swap):
        out = np.zeros((dim, dim), dtype=complex)
        ba = 1 << (num_qubits - 1 - gate.qubit_a)
        bb = 1 << (num_qubits - 1 - gate.qubit_b)
        for col in range(dim):
            row = col
            if bool(col & ba) != bool(col & bb):
                row = col ^ ba ^ bb
            out[row, col] = 1.0
        return out
    raise TypeError(f"unknown gate {gate!r}")


def permutation_matrix(mapping: np.ndarray) -> np.ndarray:
    dim = len(mapping)
    out = np.zeros((dim, dim), dtype=complex)
    out[mapping, np.arange(dim)] = 1.0
    return out


def density_marginal(amps: np.ndarray, num_qubits: int, qubits: list[int]) -> np.ndarray:
    """Diagonal of the reduced density matrix via a dense partial trace."""
    rho = np.outer(amps, amps.conj()).reshape([2] * (2 * num_qubits))
    keep = list(qubits)
    rest = [q for q in range(num_qubits) if q not in keep]
    order = keep + rest + [q + num_qubits for q in keep + rest]
    t = rho.transpose(order).reshape(
        1 << len(keep), 1 << len(rest), 1 << len(keep), 1 << len(rest)
    )
    reduced = np.einsum("arbr->ab", t)
    return np.real(np.diag(reduced))


def finite_difference_grad(loss_at, params: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Central finite differences of a scalar function of the parameters."""
    out = np.zeros(len(params))
    for k in range(len(params)):
        up = params.copy()
        up[k] += h
        down = params.copy()
        down[k] -= h
        out[k] = (loss_at(up) - loss_at(down)) / (2.0 * h)
    return out


def grads_close(computed: np.ndarray, reference: np.ndarray,
                rel: float = 1e-5, floor: float = 1e-8) -> bool:
    """Gradient tolerance: relative 1e-5 with an absolute floor of 1e-8."""
    diff = np.abs(computed - reference)
    return bool(np.all(diff <= np.maximum(rel * np.abs(reference), floor)))


def random_bound_circuit(rng, num_qubits: int, num_gates: int, share_prob: float = 0.3):
    """Random bound-gate circuit with occasional parameter sharing.

    Returns (gates, sharing) in the CircuitSpec convention: each
    parameterized gate takes the next slot, sharing maps slots to
    parameter indices.
    """
    gates = []
    sharing = []
    num_params = 0
    for _ in range(num_gates):
        kind = rng.integers(0, 6)
        if kind <= 2:  # bias towards rotations so parameters exist
            weight = int(rng.integers(1, 3)) if num_qubits > 1 else 1
            qs = rng.choice(num_qubits, size=weight, replace=False)
            letters = rng.choice(list("XYZ"), size=weight)
            word = SignedPauliString.from_map(
                {int(q): str(l) for q, l in zip(qs, letters)}, int(rng.choice([1, -1]))
            )
            gate = PauliRotation(word)
        elif kind == 3:
            gate = PhaseRotation(int(rng.integers(num_qubits)))
        elif kind == 4:
            gate = Hadamard(int(rng.integers(num_qubits)))
        elif num_qubits == 1:
            gate = PauliX(0)
        else:
            a, b = rng.choice(num_qubits, size=2, replace=False)
            gate = Swap(int(a), int(b))
        if isinstance(gate, (PauliRotation, PhaseRotation)):
            if num_params and rng.random() < share_prob:
                param = int(rng.integers(num_params))
            else:
                param = num_params
                num_params += 1
            gates.append((gate, len(sharing)))
            sharing.append(param)
        else:
            gates.append((gate, None))
    if num_params == 0:
        gates.append((PauliRotation(SignedPauliString.from_map({0: "X"})), len(sharing)))
        sharing.append(0)
    return gates, sharing
