# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: statevector gate application and Ising sweeps.

Mirrors kernels_py exactly; see that module for semantics.
"""

from libc.math cimport exp, sqrt

BACKEND_NAME = "cython"

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define EQCNN_POPCOUNT(x) __builtin_popcountll(x)
    #else
    static int EQCNN_POPCOUNT(unsigned long long x) {
        int c = 0;
        while (x) { x &= x - 1; ++c; }
        return c;
    }
    #endif
    """
    int EQCNN_POPCOUNT(unsigned long long x) nogil


def apply_pauli_rotation(double complex[::1] amps, int num_qubits,
                         long long flip_mask, long long yz_mask,
                         double complex base_phase, double cos_t, double sin_t):
    cdef long long dim = 1LL << num_qubits
    cdef double complex mis = -1j * sin_t * base_phase
    cdef long long b, j, base, off, low
    cdef double complex a0, a1, pb, pj
    if flip_mask == 0:
        for b in range(dim):
            if EQCNN_POPCOUNT(<unsigned long long>(b & yz_mask)) & 1:
                amps[b] = (cos_t - mis) * amps[b]
            else:
                amps[b] = (cos_t + mis) * amps[b]
        return
    low = flip_mask & (-flip_mask)
    for base in range(0, dim, 2 * low):
        for off in range(low):
            b = base + off
            j = b ^ flip_mask
            if EQCNN_POPCOUNT(<unsigned long long>(b & yz_mask)) & 1:
                pb = -mis
            else:
                pb = mis
            if EQCNN_POPCOUNT(<unsigned long long>(j & yz_mask)) & 1:
                pj = -mis
            else:
                pj = mis
            a0 = amps[b]
            a1 = amps[j]
            amps[b] = cos_t * a0 + pj * a1
            amps[j] = cos_t * a1 + pb * a0


def apply_pauli_string(double complex[::1] amps, int num_qubits,
                       long long flip_mask, long long yz_mask,
                       double complex base_phase):
    cdef long long dim = 1LL << num_qubits
    cdef long long b, j, base, off, low
    cdef double complex a0, pb, pj
    if flip_mask == 0:
        for b in range(dim):
            if EQCNN_POPCOUNT(<unsigned long long>(b & yz_mask)) & 1:
                amps[b] = -base_phase * amps[b]
            else:
                amps[b] = base_phase * amps[b]
        return
    low = flip_mask & (-flip_mask)
    for base in range(0, dim, 2 * low):
        for off in range(low):
            b = base + off
            j = b ^ flip_mask
            if EQCNN_POPCOUNT(<unsigned long long>(b & yz_mask)) & 1:
                pb = -base_phase
            else:
                pb = base_phase
            if EQCNN_POPCOUNT(<unsigned long long>(j & yz_mask)) & 1:
                pj = -base_phase
            else:
                pj = base_phase
            a0 = amps[b]
            amps[b] = pj * amps[j]
            amps[j] = pb * a0


def apply_hadamard(double complex[::1] amps, int num_qubits, int qubit):
    cdef long long mask = 1LL << (num_qubits - 1 - qubit)
    cdef long long dim = 1LL << num_qubits
    cdef double s2 = 1.0 / sqrt(2.0)
    cdef long long base, off, b, j
    cdef double complex a0, a1
    for base in range(0, dim, 2 * mask):
        for off in range(mask):
            b = base + off
            j = b | mask
            a0 = amps[b]
            a1 = amps[j]
            amps[b] = (a0 + a1) * s2
            amps[j] = (a0 - a1) * s2


def apply_pauli_x(double complex[::1] amps, int num_qubits, int qubit):
    cdef long long mask = 1LL << (num_qubits - 1 - qubit)
    cdef long long dim = 1LL << num_qubits
    cdef long long base, off, b, j
    cdef double complex a0
    for base in range(0, dim, 2 * mask):
        for off in range(mask):
            b = base + off
            j = b | mask
            a0 = amps[b]
            amps[b] = amps[j]
            amps[j] = a0


def apply_swap(double complex[::1] amps, int num_qubits, int qubit_a, int qubit_b):
    cdef long long ma = 1LL << (num_qubits - 1 - qubit_a)
    cdef long long mb = 1LL << (num_qubits - 1 - qubit_b)
    cdef long long dim = 1LL << num_qubits
    cdef long long b, j
    cdef double complex a0
    for b in range(dim):
        if (b & ma) != 0 and (b & mb) == 0:
            j = (b ^ ma) | mb
            a0 = amps[b]
            amps[b] = amps[j]
            amps[j] = a0


def metropolis_sweep(signed char[:, ::1] lattice, double[::1] uniforms,
                     double j_coupling, double temperature):
    cdef int size = lattice.shape[0]
    cdef double delta = 0.0
    cdef int i, j, up, down, left, right
    cdef double d_e
    cdef signed char s
    cdef int nn
    for i in range(size):
        up = i - 1 if i > 0 else size - 1
        down = i + 1 if i < size - 1 else 0
        for j in range(size):
            left = j - 1 if j > 0 else size - 1
            right = j + 1 if j < size - 1 else 0
            s = lattice[i, j]
            nn = lattice[up, j] + lattice[down, j] + lattice[i, left] + lattice[i, right]
            d_e = 2.0 * j_coupling * s * nn
            if d_e <= 0.0 or uniforms[i * size + j] < exp(-d_e / temperature):
                lattice[i, j] = -s
                delta += d_e
    return delta
