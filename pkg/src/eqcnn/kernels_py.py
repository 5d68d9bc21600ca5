"""Pure-numpy implementations of the hot kernels.

Drop-in fallback for the compiled extension; same signatures, same
semantics. All statevector kernels mutate a 1-D complex128 array in
place, with basis indices big-endian in the qubit order.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(dim: int) -> np.ndarray:
    idx = _INDEX_CACHE.get(dim)
    if idx is None:
        idx = np.arange(dim, dtype=np.int64)
        _INDEX_CACHE[dim] = idx
    return idx


def _parity_phase(idx: np.ndarray, yz_mask: int) -> np.ndarray:
    # (-1)**popcount(b & yz_mask) per basis index
    par = np.bitwise_count(idx & yz_mask).astype(np.int64) & 1
    return 1.0 - 2.0 * par


def apply_pauli_rotation(amps, num_qubits, flip_mask, yz_mask, base_phase, cos_t, sin_t):
    """exp(-i theta P) with P|b> = base_phase * (-1)**pop(b & yz) |b ^ flip>."""
    dim = 1 << num_qubits
    idx = _indices(dim)
    mis = -1j * sin_t * base_phase
    if flip_mask == 0:
        amps *= cos_t + mis * _parity_phase(idx, yz_mask)
        return
    low = flip_mask & -flip_mask
    b = idx[(idx & low) == 0]
    j = b ^ flip_mask
    pb = mis * _parity_phase(b, yz_mask)
    pj = mis * _parity_phase(j, yz_mask)
    a0 = amps[b]
    a1 = amps[j]
    amps[b] = cos_t * a0 + pj * a1
    amps[j] = cos_t * a1 + pb * a0


def apply_pauli_string(amps, num_qubits, flip_mask, yz_mask, base_phase):
    """P|psi> in place for a bare signed Pauli word."""
    dim = 1 << num_qubits
    idx = _indices(dim)
    if flip_mask == 0:
        amps *= base_phase * _parity_phase(idx, yz_mask)
        return
    low = flip_mask & -flip_mask
    b = idx[(idx & low) == 0]
    j = b ^ flip_mask
    pb = base_phase * _parity_phase(b, yz_mask)
    pj = base_phase * _parity_phase(j, yz_mask)
    a0 = amps[b]
    amps[b] = pj * amps[j]
    amps[j] = pb * a0


def apply_hadamard(amps, num_qubits, qubit):
    mask = 1 << (num_qubits - 1 - qubit)
    idx = _indices(1 << num_qubits)
    b = idx[(idx & mask) == 0]
    j = b | mask
    s2 = 1.0 / math.sqrt(2.0)
    a0 = amps[b]
    a1 = amps[j]
    amps[b] = (a0 + a1) * s2
    amps[j] = (a0 - a1) * s2


def apply_pauli_x(amps, num_qubits, qubit):
    mask = 1 << (num_qubits - 1 - qubit)
    idx = _indices(1 << num_qubits)
    b = idx[(idx & mask) == 0]
    j = b | mask
    a0 = amps[b]
    amps[b] = amps[j]
    amps[j] = a0


def apply_swap(amps, num_qubits, qubit_a, qubit_b):
    ma = 1 << (num_qubits - 1 - qubit_a)
    mb = 1 << (num_qubits - 1 - qubit_b)
    idx = _indices(1 << num_qubits)
    b = idx[((idx & ma) != 0) & ((idx & mb) == 0)]
    j = (b ^ ma) | mb
    a0 = amps[b]
    amps[b] = amps[j]
    amps[j] = a0


def metropolis_sweep(lattice, uniforms, j_coupling, temperature):
    """One raster-order single-flip sweep over a periodic lattice.

    ``uniforms`` holds one pre-drawn acceptance draw per site so the
    compiled and fallback kernels consume an identical random stream.
    Returns the accumulated energy change.
    """
    size = lattice.shape[0]
    delta = 0.0
    for i in range(size):
        up = i - 1 if i > 0 else size - 1
        down = i + 1 if i < size - 1 else 0
        row = lattice[i]
        for j in range(size):
            left = j - 1 if j > 0 else size - 1
            right = j + 1 if j < size - 1 else 0
            s = row[j]
            nn = lattice[up, j] + lattice[down, j] + row[left] + row[right]
            d_e = 2.0 * j_coupling * s * nn
            if d_e <= 0.0 or uniforms[i * size + j] < math.exp(-d_e / temperature):
                row[j] = -s
                delta += d_e
    return delta
