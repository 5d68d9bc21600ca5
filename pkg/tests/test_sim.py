import numpy as np
import pytest

from conftest import random_state_amps
from eqcnn import kernels, kernels_py
from eqcnn.pauli import SignedPauliString, parse_pauli_word
from eqcnn.sim import (
    Hadamard,
    PauliRotation,
    PauliX,
    PhaseRotation,
    QuantumState,
    Swap,
    apply_gate,
    basis_state,
    marginal_probs,
)
from oracles import dense_gate, density_marginal


def test_basis_state_definitions():
    assert np.array_equal(basis_state(2, 0).amplitudes, [1, 0, 0, 0])
    assert np.array_equal(basis_state(2, 3).amplitudes, [0, 0, 0, 1])
    v = basis_state(4, 5).amplitudes
    assert v[5] == 1 and np.count_nonzero(v) == 1


def test_basis_state_index_out_of_range():
    with pytest.raises(ValueError):
        basis_state(2, 4)
    with pytest.raises(ValueError):
        basis_state(2, -1)


def test_state_validation():
    with pytest.raises(ValueError):
        QuantumState(2, np.zeros(3, dtype=complex))
    with pytest.raises(ValueError):
        QuantumState(21, np.zeros(1 << 21, dtype=complex))


def test_zz_rotation_phases_basis_state():
    # |00> is a +1 eigenstate of Z0Z1, so the rotation is a pure phase
    theta = 0.37
    gate = PauliRotation(parse_pauli_word("Z0Z1"), theta)
    out = apply_gate(basis_state(2, 0), gate)
    assert np.allclose(out.amplitudes[0], np.exp(-1j * theta))
    assert np.allclose(np.abs(out.amplitudes), [1, 0, 0, 0])


def test_yy_half_turn_maps_00_to_11():
    gate = PauliRotation(parse_pauli_word("Y0Y1"), np.pi / 2)
    out = apply_gate(basis_state(2, 0), gate)
    # dense 4x4 oracle: (Y(x)Y)|00> = -|11>, so cos I - i sin (Y(x)Y)
    # at a half turn sends |00> to +i|11>
    ref = dense_gate(gate, 2) @ basis_state(2, 0).amplitudes
    expected = np.zeros(4, dtype=complex)
    expected[3] = 1j
    assert np.allclose(ref, expected, atol=1e-14)
    assert np.allclose(out.amplitudes, expected, atol=1e-14)


def test_hadamard_on_zero():
    out = apply_gate(basis_state(1, 0), Hadamard(0))
    assert np.allclose(out.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_phase_rotation_convention():
    # exp(-i phi Z): relative phase 2*phi between |0> and |1>
    phi = 0.3
    plus = apply_gate(basis_state(1, 0), Hadamard(0))
    out = apply_gate(plus, PhaseRotation(0, phi))
    ratio = out.amplitudes[1] / out.amplitudes[0]
    assert np.allclose(ratio, np.exp(2j * phi))


def _random_gate(rng, nq):
    kind = rng.integers(0, 5)
    if kind == 0:
        weight = int(rng.integers(1, min(nq, 2) + 1))
        qs = rng.choice(nq, size=weight, replace=False)
        letters = rng.choice(list("XYZ"), size=weight)
        word = SignedPauliString.from_map(
            {int(q): str(l) for q, l in zip(qs, letters)}, int(rng.choice([1, -1]))
        )
        return PauliRotation(word, float(rng.normal()))
    if kind == 1:
        return Hadamard(int(rng.integers(nq)))
    if kind == 2:
        return PhaseRotation(int(rng.integers(nq)), float(rng.normal()))
    if kind == 3:
        return PauliX(int(rng.integers(nq)))
    a, b = rng.choice(nq, size=2, replace=False) if nq > 1 else (0, 0)
    if a == b:
        return PauliX(0)
    return Swap(int(a), int(b))


def test_apply_gate_matches_dense_oracle(rng):
    for _ in range(120):
        nq = int(rng.integers(1, 4))
        gate = _random_gate(rng, nq)
        amps = random_state_amps(rng, nq)
        out = apply_gate(QuantumState(nq, amps), gate)
        ref = dense_gate(gate, nq) @ amps
        assert np.allclose(out.amplitudes, ref, atol=1e-12)


def test_norm_preserved_and_inverse_recovers(rng):
    for _ in range(40):
        nq = int(rng.integers(1, 6))
        amps = random_state_amps(rng, nq)
        state = QuantumState(nq, amps)
        gates = [_random_gate(rng, nq) for _ in range(12)]
        out = state
        for g in gates:
            out = apply_gate(out, g)
            assert abs(out.norm() - 1.0) < 1e-10
        # undo in reverse
        for g in reversed(gates):
            if isinstance(g, PauliRotation):
                g = PauliRotation(g.generator, -g.angle)
            elif isinstance(g, PhaseRotation):
                g = PhaseRotation(g.qubit, -g.angle)
            out = apply_gate(out, g)
        assert np.max(np.abs(out.amplitudes - amps)) < 1e-10


def test_gate_errors():
    state = basis_state(2, 0)
    with pytest.raises(ValueError):
        apply_gate(state, Hadamard(2))
    with pytest.raises(ValueError):
        apply_gate(state, PauliRotation(parse_pauli_word("X3"), 0.1))
    with pytest.raises(ValueError):
        apply_gate(state, Swap(1, 1))
    with pytest.raises(ValueError):
        apply_gate(state, PauliRotation(parse_pauli_word("X0")))  # unbound angle


def test_zero_angle_rotation_is_identity(rng):
    amps = random_state_amps(rng, 3)
    out = apply_gate(QuantumState(3, amps), PauliRotation(parse_pauli_word("Y0Z2"), 0.0))
    assert np.array_equal(out.amplitudes, amps)


def test_marginal_product_state():
    # |01>: qubit 0 (x register) is 0, qubit 1 (y register) is 1
    state = basis_state(2, 1)
    assert np.allclose(marginal_probs(state, [1]), [0, 1])
    assert np.allclose(marginal_probs(state, [0]), [1, 0])


def test_marginal_bell_state():
    bell = QuantumState(2, np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))
    assert np.allclose(marginal_probs(bell, [0]), [0.5, 0.5])


def test_marginal_matches_partial_trace_oracle(rng):
    for _ in range(25):
        amps = random_state_amps(rng, 3)
        state = QuantumState(3, amps)
        for keep in ([0], [2], [0, 2], [2, 0], [1, 2], [0, 1, 2]):
            got = marginal_probs(state, keep)
            ref = density_marginal(amps, 3, keep)
            assert np.allclose(got, ref, atol=1e-12)
            assert abs(got.sum() - 1.0) < 1e-10
            assert np.all(got >= -1e-15)


def test_marginal_over_all_qubits_is_probabilities(rng):
    amps = random_state_amps(rng, 4)
    state = QuantumState(4, amps)
    assert np.allclose(marginal_probs(state, range(4)), np.abs(amps) ** 2)


def test_marginal_errors():
    state = basis_state(2, 0)
    with pytest.raises(ValueError):
        marginal_probs(state, [])
    with pytest.raises(ValueError):
        marginal_probs(state, [0, 0])
    with pytest.raises(ValueError):
        marginal_probs(state, [5])


def test_backends_agree(rng):
    if kernels.BACKEND != "cython":
        pytest.skip("compiled backend not built; nothing to cross-check")
    for _ in range(60):
        nq = int(rng.integers(1, 6))
        amps = random_state_amps(rng, nq)
        a = amps.copy()
        b = amps.copy()
        gate = _random_gate(rng, nq)
        if isinstance(gate, PauliRotation):
            flip, yz, base = gate.generator.masks(nq)
            args = (nq, flip, yz, base, np.cos(gate.angle), np.sin(gate.angle))
            kernels.apply_pauli_rotation(a, *args)
            kernels_py.apply_pauli_rotation(b, *args)
        elif isinstance(gate, Hadamard):
            kernels.apply_hadamard(a, nq, gate.qubit)
            kernels_py.apply_hadamard(b, nq, gate.qubit)
        elif isinstance(gate, PhaseRotation):
            yz = 1 << (nq - 1 - gate.qubit)
            args = (nq, 0, yz, 1.0 + 0j, np.cos(gate.angle), np.sin(gate.angle))
            kernels.apply_pauli_rotation(a, *args)
            kernels_py.apply_pauli_rotation(b, *args)
        elif isinstance(gate, PauliX):
            kernels.apply_pauli_x(a, nq, gate.qubit)
            kernels_py.apply_pauli_x(b, nq, gate.qubit)
        else:
            kernels.apply_swap(a, nq, gate.qubit_a, gate.qubit_b)
            kernels_py.apply_swap(b, nq, gate.qubit_a, gate.qubit_b)
        assert np.allclose(a, b, atol=1e-14)
