"""Exact dense statevector simulation with reverse-mode gradients.

Conventions, fixed once and asserted in tests:

* Basis indices are big-endian in qubit order: qubit k owns bit
  (num_qubits - 1 - k) of the index. With 2n qubits the first n qubits
  form the x-register and the last n the y-register, so the product
  basis |i>|j> sits at index i * 2**n + j.
* Every rotation is exp(-i * angle * G) for a signed Pauli word G.
  PhaseRotation(q, phi) is exp(-i * phi * Z_q): relative phase 2*phi
  between |0> and |1>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .pauli import SignedPauliString

MAX_QUBITS = 20


@dataclass
class QuantumState:
    """Dense complex amplitude vector over num_qubits qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"amplitude vector must have length {1 << self.num_qubits}, got {amps.shape}"
            )
        self.amplitudes = amps

    def copy(self) -> "QuantumState":
        return QuantumState(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class PauliRotation:
    """exp(-i * angle * generator); angle None marks a trainable template."""

    generator: SignedPauliString
    angle: float | None = None


@dataclass(frozen=True)
class Hadamard:
    qubit: int


@dataclass(frozen=True)
class PhaseRotation:
    """exp(-i * angle * Z_qubit); angle None marks a trainable template."""

    qubit: int
    angle: float | None = None


@dataclass(frozen=True)
class PauliX:
    qubit: int


@dataclass(frozen=True)
class Swap:
    qubit_a: int
    qubit_b: int


GateOp = PauliRotation | Hadamard | PhaseRotation | PauliX | Swap

# A bound gate is (gate, slot): slot indexes the circuit's sharing map,
# None means the gate is fixed (or carries its own literal angle).
BoundGate = tuple[GateOp, "int | None"]


@dataclass
class GradientTape:
    """Accumulated d(loss)/d(parameter), one entry per distinct parameter."""

    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def basis_state(num_qubits: int, index: int) -> QuantumState:
    dim = 1 << num_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(num_qubits, amps)


def _check_qubit(qubit: int, num_qubits: int):
    if not 0 <= qubit < num_qubits:
        raise ValueError(f"qubit {qubit} out of range for {num_qubits} qubits")


def apply_gate_inplace(amps: np.ndarray, num_qubits: int, gate: GateOp,
                       angle: float | None = None):
    """Apply one gate to a raw amplitude array. ``angle`` overrides templates."""
    if isinstance(gate, PauliRotation):
        theta = gate.angle if angle is None else angle
        if theta is None:
            raise ValueError("PauliRotation applied without a bound angle")
        flip, yz, base = gate.generator.masks(num_qubits)
        kernels.apply_pauli_rotation(amps, num_qubits, flip, yz, base,
                                     math.cos(theta), math.sin(theta))
    elif isinstance(gate, PhaseRotation):
        phi = gate.angle if angle is None else angle
        if phi is None:
            raise ValueError("PhaseRotation applied without a bound angle")
        _check_qubit(gate.qubit, num_qubits)
        yz = 1 << (num_qubits - 1 - gate.qubit)
        kernels.apply_pauli_rotation(amps, num_qubits, 0, yz, 1.0 + 0.0j,
                                     math.cos(phi), math.sin(phi))
    elif isinstance(gate, Hadamard):
        _check_qubit(gate.qubit, num_qubits)
        kernels.apply_hadamard(amps, num_qubits, gate.qubit)
    elif isinstance(gate, PauliX):
        _check_qubit(gate.qubit, num_qubits)
        kernels.apply_pauli_x(amps, num_qubits, gate.qubit)
    elif isinstance(gate, Swap):
        _check_qubit(gate.qubit_a, num_qubits)
        _check_qubit(gate.qubit_b, num_qubits)
        if gate.qubit_a == gate.qubit_b:
            raise ValueError("Swap needs two distinct qubits")
        kernels.apply_swap(amps, num_qubits, gate.qubit_a, gate.qubit_b)
    else:
        raise TypeError(f"unknown gate {gate!r}")


def apply_gate(state: QuantumState, gate: GateOp) -> QuantumState:
    """Apply one gate, returning a new state (value semantics)."""
    out = state.copy()
    apply_gate_inplace(out.amplitudes, out.num_qubits, gate)
    return out


def _unapply_gate_inplace(amps: np.ndarray, num_qubits: int, gate: GateOp,
                          angle: float | None):
    if isinstance(gate, PauliRotation):
        theta = gate.angle if angle is None else angle
        apply_gate_inplace(amps, num_qubits, gate, -theta)
    elif isinstance(gate, PhaseRotation):
        phi = gate.angle if angle is None else angle
        apply_gate_inplace(amps, num_qubits, gate, -phi)
    else:
        # Hadamard, PauliX and Swap are involutions.
        apply_gate_inplace(amps, num_qubits, gate)


def _bound_angle(gate: GateOp, slot: int | None, params: np.ndarray,
                 sharing: np.ndarray) -> float | None:
    if slot is None:
        return None
    if not isinstance(gate, (PauliRotation, PhaseRotation)):
        raise ValueError(f"gate {gate!r} cannot carry a parameter slot")
    return float(params[sharing[slot]])


def run_gates(amps: np.ndarray, num_qubits: int, gates: list[BoundGate],
              params: np.ndarray, sharing: np.ndarray):
    """Apply a bound gate sequence in place."""
    for gate, slot in gates:
        apply_gate_inplace(amps, num_qubits, gate,
                           _bound_angle(gate, slot, params, sharing))


def _gate_generator(gate: GateOp) -> SignedPauliString:
    if isinstance(gate, PauliRotation):
        return gate.generator
    if isinstance(gate, PhaseRotation):
        return SignedPauliString.from_map({gate.qubit: "Z"})
    raise ValueError(f"gate {gate!r} has no rotation generator")


def adjoint_gradient(gates: list[BoundGate], sharing, params, input_amps: np.ndarray,
                     num_qubits: int, loss_fn):
    """Reverse-accumulation gradient through a unitary gate sequence.

    ``loss_fn`` maps the final basis probabilities to
    (loss, dloss_dprobs); every probability is the expectation of a
    diagonal projector, which is what makes one backward sweep exact.
    Returns (loss, probs, grads) with shared slots summed into their
    parameter.
    """
    sharing = np.asarray(sharing, dtype=np.int64)
    params = np.asarray(params, dtype=np.float64)
    ket = np.ascontiguousarray(input_amps, dtype=np.complex128).copy()
    bound = [(gate, slot, _bound_angle(gate, slot, params, sharing))
             for gate, slot in gates]
    return _adjoint_bound(bound, sharing, len(params), ket, num_qubits, loss_fn)


def _adjoint_bound(bound, sharing, num_params, ket, num_qubits, loss_fn):
    for gate, _, angle in bound:
        apply_gate_inplace(ket, num_qubits, gate, angle)
    probs = np.abs(ket) ** 2
    loss, dprobs = loss_fn(probs)
    # lambda = dL/d(psi*) for L a function of |psi_b|^2 only.
    bra = np.asarray(dprobs, dtype=np.float64) * ket
    grads = np.zeros(num_params, dtype=np.float64)
    for gate, slot, angle in reversed(bound):
        if slot is not None:
            flip, yz, base = _gate_generator(gate).masks(num_qubits)
            mu = ket.copy()
            kernels.apply_pauli_string(mu, num_qubits, flip, yz, base)
            # 2 Re(<bra| -iG |ket>) = 2 Im(<bra|mu>)
            grads[sharing[slot]] += 2.0 * np.vdot(bra, mu).imag
        _unapply_gate_inplace(ket, num_qubits, gate, angle)
        _unapply_gate_inplace(bra, num_qubits, gate, angle)
    return float(loss), probs, grads


def marginal_probs(state: QuantumState, qubits) -> np.ndarray:
    """Probability distribution over an ordered subset of qubits.

    Entry k sums |amplitude|^2 over all basis states whose bits on the
    subset (first listed qubit most significant) equal k; unlisted
    qubits are traced out.
    """
    qubits = list(qubits)
    if not qubits:
        raise ValueError("empty qubit subset")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubits in subset {qubits}")
    for q in qubits:
        _check_qubit(q, state.num_qubits)
    n = state.num_qubits
    probs = np.abs(state.amplitudes) ** 2
    grid = probs.reshape([2] * n)
    rest = [ax for ax in range(n) if ax not in qubits]
    return grid.transpose(qubits + rest).reshape(1 << len(qubits), -1).sum(axis=1)
