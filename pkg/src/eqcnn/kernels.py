"""Kernel backend selection.

Imports the compiled extension when it is available, the numpy fallback
otherwise. Set EQCNN_PURE_PYTHON=1 to force the fallback (used by the
benchmark to compare both backends).
"""

from __future__ import annotations

import os

if os.environ.get("EQCNN_PURE_PYTHON"):
    from . import kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import kernels_py as _impl

BACKEND = _impl.BACKEND_NAME

apply_pauli_rotation = _impl.apply_pauli_rotation
apply_pauli_string = _impl.apply_pauli_string
apply_hadamard = _impl.apply_hadamard
apply_pauli_x = _impl.apply_pauli_x
apply_swap = _impl.apply_swap
metropolis_sweep = _impl.metropolis_sweep
