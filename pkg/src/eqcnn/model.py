"""QCNN architectures and the approximately invariant measurement head.

Three builds share one layered skeleton (scanning, learning layers,
pooling, two-qubit readout):

* ``equiv``: two-qubit filters inside each register plus four-qubit
  mirrored filters across registers; exactly commutes with all eight
  square-symmetry representations.
* ``appr_equiv``: the equivariant circuit plus a register-bridge
  two-qubit filter pair per learning layer. The bridge pair is built to
  stay rotation-equivariant while breaking the reflections, which is
  the controlled symmetry noise this variant trades for expressibility.
* ``nonequiv``: an SO(4)-filter QCNN over the plain qubit line, no
  mirror sharing; the baseline.

Filters inside one layer share parameters; for the equivariant builds
every x-register gate has a y-register mirror bound to the same
parameter, which is what makes register exchange a symmetry of the
whole circuit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .embedding import ImageSample, caa_embed
from .pauli import SignedPauliString
from .sim import (
    BoundGate,
    GateOp,
    GradientTape,
    Hadamard,
    PauliRotation,
    PhaseRotation,
    QuantumState,
    adjoint_gradient,
    marginal_probs,
    run_gates,
)

PROB_CLAMP = 1e-12

ARCHITECTURES = ("equiv", "appr_equiv", "nonequiv")


@dataclass(frozen=True)
class CircuitSpec:
    """Ordered gate list with a slot -> parameter sharing map.

    Each parameterized gate occupies one slot (in order of appearance);
    ``sharing[slot]`` is the trainable parameter feeding it, so mirror
    and in-layer weight sharing are just repeated parameter indices.
    """

    num_qubits: int
    gates: tuple[BoundGate, ...]
    sharing: tuple[int, ...]
    active_per_layer: tuple[tuple[int, ...], ...]
    measured: tuple[int, int]
    arch: str = ""
    bridge_params: tuple[int, ...] = ()

    def __post_init__(self):
        slots = [slot for _, slot in self.gates if slot is not None]
        if slots != list(range(len(self.sharing))):
            raise ValueError("gate slots must enumerate the sharing map in order")
        if self.sharing:
            bound = set(self.sharing)
            if bound != set(range(max(bound) + 1)):
                raise ValueError("every parameter index must be bound by at least one slot")

    @property
    def num_params(self) -> int:
        return max(self.sharing) + 1 if self.sharing else 0


@dataclass(frozen=True)
class MeasurementHead:
    """Readout on one mirrored qubit pair (or log2(L) pairs for L classes).

    mode M1 pins the phase angle to zero (exactly invariant readout);
    M2 lets it train, making the readout approximately invariant with
    deviation bounded by |sin(2*phi)|.
    """

    mode: str = "M1"
    phi: float = 0.0
    i_m: int = 1
    num_classes: int = 2

    def __post_init__(self):
        if self.mode not in ("M1", "M2"):
            raise ValueError(f"head mode must be M1 or M2, got {self.mode!r}")
        if self.mode == "M1" and self.phi != 0.0:
            raise ValueError("M1 requires phi = 0")
        L = self.num_classes
        if L < 2 or L & (L - 1):
            raise ValueError(f"class count must be a power of two >= 2, got {L}")
        if self.num_measured > self.i_m:
            raise ValueError(
                f"{L} classes need {self.num_measured} measured qubits per register, "
                f"but i_m = {self.i_m} leaves only {self.i_m}"
            )

    @property
    def num_measured(self) -> int:
        return self.num_classes.bit_length() - 1

    def measured_sets(self, n: int) -> tuple[list[int], list[int]]:
        """0-based measured qubits on the x and y registers."""
        if not 1 <= self.i_m <= n:
            raise ValueError(f"i_m = {self.i_m} outside register of size {n}")
        xs = list(range(self.i_m - self.num_measured, self.i_m))
        return xs, [q + n for q in xs]


class _Builder:
    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits
        self.gates: list[BoundGate] = []
        self.sharing: list[int] = []
        self.next_param = 0

    def alloc(self, count: int) -> list[int]:
        out = list(range(self.next_param, self.next_param + count))
        self.next_param += count
        return out

    def rotation(self, generator: SignedPauliString, param: int):
        self.gates.append((PauliRotation(generator), len(self.sharing)))
        self.sharing.append(param)

    def emit(self, template: list[tuple[GateOp, int]], params: list[int]):
        for gate, slot in template:
            self.gates.append((gate, len(self.sharing)))
            self.sharing.append(params[slot])


def _word(mapping: dict[int, str], sign: int = 1) -> SignedPauliString:
    return SignedPauliString.from_map(mapping, sign)


def build_u2(pair: tuple[int, int]) -> list[tuple[GateOp, int]]:
    """Two-qubit equivariant filter template: RX, RX, R_YY, R_ZZ (4 slots)."""
    a, b = pair
    if a == b:
        raise ValueError("filter pair needs two distinct qubits")
    return [
        (PauliRotation(_word({a: "X"})), 0),
        (PauliRotation(_word({b: "X"})), 1),
        (PauliRotation(_word({a: "Y", b: "Y"})), 2),
        (PauliRotation(_word({a: "Z", b: "Z"})), 3),
    ]


def _u2_negated(pair: tuple[int, int]) -> list[tuple[GateOp, int]]:
    # Bridge twin: two-body generators carry sign -1 so the pair of
    # bridges maps onto itself under the 90-degree rotation.
    a, b = pair
    return [
        (PauliRotation(_word({a: "X"})), 0),
        (PauliRotation(_word({b: "X"})), 1),
        (PauliRotation(_word({a: "Y", b: "Y"}, sign=-1)), 2),
        (PauliRotation(_word({a: "Z", b: "Z"}, sign=-1)), 3),
    ]


def build_u4(quad: tuple[int, int, int, int]) -> list[tuple[GateOp, int]]:
    """Four-qubit mirrored filter template on (i, j, i+n, j+n), 6 slots.

    One rotation per letter pair (s, s'); the mixed words (s, s') and
    (s', s) are applied back to back with a shared slot, so register
    exchange maps the template onto itself slot by slot.
    """
    i, j, im, jm = quad
    n = im - i
    if n < 1 or jm - j != n or i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"quad {quad} is not of the mirrored form (i, j, i+n, j+n)")

    def word(s: str, sp: str) -> SignedPauliString:
        return _word({i: s, j: s, im: sp, jm: sp})

    template: list[tuple[GateOp, int]] = []
    for slot, s in enumerate(("X", "Y", "Z")):
        template.append((PauliRotation(word(s, s)), slot))
    for slot, (s, sp) in enumerate((("X", "Y"), ("X", "Z"), ("Y", "Z")), start=3):
        template.append((PauliRotation(word(s, sp)), slot))
        template.append((PauliRotation(word(sp, s)), slot))
    return template


def build_so4_filter(pair: tuple[int, int]) -> list[tuple[GateOp, int]]:
    """Two-qubit block covering all SO(4) rotations, 6 slots.

    Exponentials of the odd-Y two-qubit words are real orthogonal; the
    two commuting triples below are the magic-basis images of two
    independent single-qubit Euler rotation triples.
    """
    a, b = pair
    if a == b:
        raise ValueError("filter pair needs two distinct qubits")
    yx = _word({a: "Y", b: "X"})
    yz = _word({a: "Y", b: "Z"})
    xy = _word({a: "X", b: "Y"})
    zy = _word({a: "Z", b: "Y"})
    return [
        (PauliRotation(yx), 0),
        (PauliRotation(yz), 1),
        (PauliRotation(yx), 2),
        (PauliRotation(xy), 3),
        (PauliRotation(zy), 4),
        (PauliRotation(xy), 5),
    ]


def _adjacent_pairs(qubits: list[int]) -> list[tuple[int, int]]:
    return [(qubits[k], qubits[k + 1]) for k in range(0, len(qubits) - 1, 2)]


def _staggered_pairs(qubits: list[int]) -> list[tuple[int, int]]:
    return [(qubits[k], qubits[k + 1]) for k in range(1, len(qubits) - 1, 2)]


def build_qcnn(arch: str, n: int) -> CircuitSpec:
    """Layered circuit on 2n qubits, pooling down to one qubit per register.

    The x register is qubits 0..n-1, the y register n..2n-1; pooling
    keeps the higher qubit of each pair, so the readout pair ends up at
    (n-1, 2n-1).
    """
    if arch not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {arch!r}; expected one of {ARCHITECTURES}")
    if n < 2 or n % 2:
        raise ValueError(f"register size must be even and >= 2, got {n}")
    num_qubits = 2 * n
    b = _Builder(num_qubits)
    layers: list[tuple[int, ...]] = [tuple(range(num_qubits))]
    bridge_params: list[int] = []

    if arch == "nonequiv":
        active = list(range(num_qubits))
        params = b.alloc(6)
        for pair in _adjacent_pairs(active):
            b.emit(build_so4_filter(pair), params)
        params = b.alloc(6)
        for pair in _staggered_pairs(active):
            b.emit(build_so4_filter(pair), params)
        while True:
            pairs = _adjacent_pairs(active)
            params = b.alloc(6)
            for dropped, kept in pairs:
                b.emit(build_so4_filter((kept, dropped)), params)
            active = [kept for _, kept in pairs]
            layers.append(tuple(active))
            if len(active) == 2:
                break
            params = b.alloc(6)
            for pair in _adjacent_pairs(active):
                b.emit(build_so4_filter(pair), params)
        measured = (active[0], active[1])
    else:
        active = list(range(n))

        def mirrored_u2(pairs, params):
            for pair in pairs:
                b.emit(build_u2(pair), params)
            for qa, qb in pairs:
                b.emit(build_u2((qa + n, qb + n)), params)

        mirrored_u2(_adjacent_pairs(active), b.alloc(4))
        staggered = _staggered_pairs(active)
        if staggered:
            mirrored_u2(staggered, b.alloc(4))
        while len(active) > 1:
            pairs = _adjacent_pairs(active)
            params = b.alloc(6)
            for i, j in pairs:
                b.emit(build_u4((i, j, i + n, j + n)), params)
            if arch == "appr_equiv":
                params = b.alloc(4)
                bridge_params.extend(params)
                bx, by = active[-1], active[0] + n
                b.emit(build_u2((bx, by)), params)
                b.emit(_u2_negated((bx + n, by - n)), params)
            pool_params = b.alloc(4)
            for dropped, kept in pairs:
                b.emit(build_u2((kept, dropped)), pool_params)
                b.emit(build_u2((kept + n, dropped + n)), pool_params)
            active = [kept for _, kept in pairs]
            layers.append(tuple(active) + tuple(q + n for q in active))
        measured = (active[0], active[0] + n)

    return CircuitSpec(
        num_qubits=num_qubits,
        gates=tuple(b.gates),
        sharing=tuple(b.sharing),
        active_per_layer=tuple(layers),
        measured=measured,
        arch=arch,
        bridge_params=tuple(bridge_params),
    )


def num_trainable_params(circuit: CircuitSpec, head: MeasurementHead) -> int:
    """Circuit parameters plus the head phase when it trains (M2)."""
    return circuit.num_params + (1 if head.mode == "M2" else 0)


# ---------------------------------------------------------------------------
# Measurement head evaluation

def _head_gates(head: MeasurementHead, n: int):
    """Phase-then-Hadamard readout gates on the measured qubit pairs."""
    xs, ys = head.measured_sets(n)
    gates: list[BoundGate] = []
    for q in xs + ys:
        if head.phi != 0.0:
            gates.append((PhaseRotation(q, head.phi), None))
        gates.append((Hadamard(q), None))
    return gates, xs, ys


def register_probs(state: QuantumState, head: MeasurementHead) -> tuple[np.ndarray, np.ndarray]:
    """Per-register readout distributions (p, p') after the head gates."""
    if state.num_qubits % 2:
        raise ValueError("head expects a two-register state with an even qubit count")
    n = state.num_qubits // 2
    gates, xs, ys = _head_gates(head, n)
    work = state.copy()
    run_gates(work.amplitudes, work.num_qubits, gates, np.empty(0), np.empty(0, dtype=np.int64))
    return marginal_probs(work, xs), marginal_probs(work, ys)


def measure_head(state: QuantumState, head: MeasurementHead) -> np.ndarray:
    """Class distribution: the mean of the two register readouts."""
    p, pp = register_probs(state, head)
    return (p + pp) / 2.0


# ---------------------------------------------------------------------------
# Forward prediction and reverse-mode loss gradient

def run_circuit(circuit: CircuitSpec, params, state: QuantumState) -> QuantumState:
    params = np.asarray(params, dtype=np.float64)
    if len(params) != circuit.num_params:
        raise ValueError(f"expected {circuit.num_params} parameters, got {len(params)}")
    out = state.copy()
    run_gates(out.amplitudes, out.num_qubits, circuit.gates, params,
              np.asarray(circuit.sharing, dtype=np.int64))
    return out


def _split_params(circuit: CircuitSpec, head: MeasurementHead, params):
    params = np.asarray(params, dtype=np.float64)
    expected = num_trainable_params(circuit, head)
    if len(params) != expected:
        raise ValueError(f"expected {expected} parameters, got {len(params)}")
    if head.mode == "M2":
        return params[:-1], replace(head, phi=float(params[-1]))
    return params, head


def predict_state(circuit: CircuitSpec, params, head: MeasurementHead,
                  state: QuantumState) -> np.ndarray:
    """Circuit plus measurement head on an already-embedded state."""
    circ_params, eff_head = _split_params(circuit, head, params)
    if state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits, circuit has {circuit.num_qubits}"
        )
    final = run_circuit(circuit, circ_params, state)
    return measure_head(final, eff_head)


def predict(circuit: CircuitSpec, params, head: MeasurementHead,
            image: ImageSample) -> np.ndarray:
    """caa_embed -> circuit -> measurement head; a distribution over classes.

    For M2 heads the trained phase rides along as the last parameter.
    """
    return predict_state(circuit, params, head, caa_embed(image))


_PATTERN_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _measured_patterns(num_qubits: int, xs: tuple[int, ...], ys: tuple[int, ...]):
    """Per-basis-state readout patterns on the two measured subsets."""
    key = (num_qubits, xs, ys)
    cached = _PATTERN_CACHE.get(key)
    if cached is None:
        idx = np.arange(1 << num_qubits, dtype=np.int64)
        xb = np.zeros_like(idx)
        yb = np.zeros_like(idx)
        m = len(xs)
        for pos, q in enumerate(xs):
            xb |= ((idx >> (num_qubits - 1 - q)) & 1) << (m - 1 - pos)
        for pos, q in enumerate(ys):
            yb |= ((idx >> (num_qubits - 1 - q)) & 1) << (m - 1 - pos)
        cached = (xb, yb)
        _PATTERN_CACHE[key] = cached
    return cached


def loss_gradient(circuit: CircuitSpec, params, input_state: QuantumState,
                  head: MeasurementHead, label) -> tuple[float, GradientTape]:
    """Cross-entropy loss and its exact reverse-accumulation gradient.

    Shared parameters receive the sum over all gate slots bound to
    them; for M2 heads the phase gradient lands in the last entry.
    """
    label = np.asarray(label, dtype=np.float64)
    if len(label) != head.num_classes:
        raise ValueError(
            f"label has length {len(label)}, head classifies {head.num_classes}"
        )
    params = np.asarray(params, dtype=np.float64)
    expected = num_trainable_params(circuit, head)
    if len(params) != expected:
        raise ValueError(f"expected {expected} parameters, got {len(params)}")
    nq = circuit.num_qubits
    n = nq // 2
    gates = list(circuit.gates)
    sharing = list(circuit.sharing)
    xs, ys = head.measured_sets(n)
    if head.mode == "M2":
        phi_param = circuit.num_params
        for q in xs + ys:
            gates.append((PhaseRotation(q), len(sharing)))
            sharing.append(phi_param)
            gates.append((Hadamard(q), None))
    else:
        for q in xs + ys:
            if head.phi != 0.0:
                gates.append((PhaseRotation(q, head.phi), None))
            gates.append((Hadamard(q), None))
    xb, yb = _measured_patterns(nq, tuple(xs), tuple(ys))

    def loss_fn(probs: np.ndarray):
        out = 0.5 * (np.bincount(xb, weights=probs, minlength=head.num_classes)
                     + np.bincount(yb, weights=probs, minlength=head.num_classes))
        loss = -float(np.sum(label * np.log(np.maximum(out, PROB_CLAMP))))
        w = np.where(out > PROB_CLAMP, -label / np.maximum(out, PROB_CLAMP), 0.0)
        dprobs = 0.5 * (w[xb] + w[yb])
        return loss, dprobs

    loss, _, grads = adjoint_gradient(gates, sharing, params,
                                      input_state.amplitudes, nq, loss_fn)
    return loss, GradientTape(grads)
