"""p4m-equivariant quantum convolutional neural networks.

Exact statevector simulation with compiled hot kernels, a symmetry
toolkit for the square group (induced representations, symbolic
twirling, equivariance audits), the coordinate-aware amplitude
embedding, three QCNN architectures with an approximately invariant
measurement head, and the Ising / extended-MNIST training pipelines.
"""

from .embedding import ImageSample, apply_group_to_image, caa_embed
from .kernels import BACKEND as KERNEL_BACKEND
from .model import (
    CircuitSpec,
    MeasurementHead,
    build_qcnn,
    build_so4_filter,
    build_u2,
    build_u4,
    loss_gradient,
    measure_head,
    predict,
)
from .pauli import SignedPauliString, parse_pauli_word
from .sim import (
    GradientTape,
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
from .symmetry import (
    BasisPermutation,
    GroupElement,
    RegisterAction,
    audit_circuit,
    conjugate_pauli,
    enumerate_equivariant_gateset,
    group_elements,
    induced_rep,
    is_equivariant_generator,
    twirl,
)
from .training import RunHistory, TrainConfig, adam_step, cross_entropy, sweep, train

__version__ = "0.1.0"
