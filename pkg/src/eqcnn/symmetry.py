"""The square symmetry group p4m on the two-register image layout.

Every group element acts on pixel coordinates through a signed 2x2
integer matrix (exact), on basis states through a permutation, and on
Pauli words through a structured action built from X layers and a
register exchange. Twirls are computed symbolically on signed Pauli
words; dense matrix averaging survives only as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .pauli import SignedPauliString
from .sim import QuantumState, run_gates

#: Commutation defect below which a circuit counts as equivariant.
EQUIV_TOL = 1e-10

GROUP_LABELS = ("e", "r", "r2", "r3", "tx", "ty", "d1", "d2")

# Action on centered pixel coordinates (u, v) = (2i - (N-1), 2j - (N-1)),
# column-vector convention: (u', v') = M @ (u, v).
_MATS: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
    "e": ((1, 0), (0, 1)),
    "r": ((0, -1), (1, 0)),
    "r2": ((-1, 0), (0, -1)),
    "r3": ((0, 1), (-1, 0)),
    "tx": ((-1, 0), (0, 1)),
    "ty": ((1, 0), (0, -1)),
    "d1": ((0, -1), (-1, 0)),
    "d2": ((0, 1), (1, 0)),
}


@dataclass(frozen=True)
class GroupElement:
    """One of the eight point-group elements, with its coordinate matrix."""

    label: str
    mat: tuple[tuple[int, int], tuple[int, int]]

    def __str__(self) -> str:
        return self.label


_ELEMENTS = {label: GroupElement(label, m) for label, m in _MATS.items()}
_BY_MAT = {m: label for label, m in _MATS.items()}


def element(label: str) -> GroupElement:
    try:
        return _ELEMENTS[label]
    except KeyError:
        raise ValueError(f"unknown group element {label!r}; expected one of {GROUP_LABELS}")


def all_elements() -> tuple[GroupElement, ...]:
    return tuple(_ELEMENTS[label] for label in GROUP_LABELS)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """g after h: (g o h)(p) = g(h(p))."""
    a, b = g.mat, h.mat
    m = tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2))
        for i in range(2)
    )
    return _ELEMENTS[_BY_MAT[m]]


def inverse(g: GroupElement) -> GroupElement:
    m = g.mat
    inv = ((m[0][0], m[1][0]), (m[0][1], m[1][1]))  # signed permutation: inverse = transpose
    return _ELEMENTS[_BY_MAT[inv]]


def pixel_map(g: GroupElement, size: int, i, j):
    """Image of pixel coordinates under g, exact in integers."""
    u = 2 * np.asarray(i) - (size - 1)
    v = 2 * np.asarray(j) - (size - 1)
    m = g.mat
    u2 = m[0][0] * u + m[0][1] * v
    v2 = m[1][0] * u + m[1][1] * v
    return (u2 + size - 1) // 2, (v2 + size - 1) // 2


@dataclass(eq=False)
class BasisPermutation:
    """Permutation of computational basis indices realizing a group element.

    All p4m induced representations on the coordinate-aware embedding
    are pure permutations (sign always +1). ``mapping[b]`` is the image
    index: V|b> = |mapping[b]>.
    """

    n: int
    mapping: np.ndarray

    def __post_init__(self):
        self.mapping = np.asarray(self.mapping, dtype=np.int64)
        dim = 1 << (2 * self.n)
        if self.mapping.shape != (dim,):
            raise ValueError(f"mapping must have length {dim}")
        if len(np.unique(self.mapping)) != dim:
            raise ValueError("mapping is not a bijection")

    @property
    def num_qubits(self) -> int:
        return 2 * self.n

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BasisPermutation)
            and self.n == other.n
            and np.array_equal(self.mapping, other.mapping)
        )

    def compose(self, other: "BasisPermutation") -> "BasisPermutation":
        """self after other, matching compose() on group elements."""
        if self.n != other.n:
            raise ValueError("register sizes differ")
        return BasisPermutation(self.n, self.mapping[other.mapping])

    def apply_to_amps(self, amps: np.ndarray) -> np.ndarray:
        out = np.empty_like(amps)
        out[self.mapping] = amps
        return out

    def apply(self, state: QuantumState) -> QuantumState:
        if state.num_qubits != self.num_qubits:
            raise ValueError("state size does not match permutation")
        return QuantumState(state.num_qubits, self.apply_to_amps(state.amplitudes))


def induced_rep(g: GroupElement, n: int) -> BasisPermutation:
    """Permutation action on basis states |i>|j> induced by g on pixels."""
    if n < 1:
        raise ValueError(f"register size must be >= 1, got {n}")
    size = 1 << n
    i, j = np.divmod(np.arange(size * size, dtype=np.int64), size)
    i2, j2 = pixel_map(g, size, i, j)
    return BasisPermutation(n, i2 * size + j2)


def group_elements(n: int) -> list[tuple[GroupElement, BasisPermutation]]:
    """All eight elements with their induced representations."""
    return [(g, induced_rep(g, n)) for g in all_elements()]


# ---------------------------------------------------------------------------
# Structured actions: every induced representation factors into X layers
# on whole registers and an optional register exchange, which is what
# keeps conjugation inside the signed Pauli words.

@dataclass(frozen=True)
class RegisterAction:
    """X layers on the x/y registers followed by an optional exchange."""

    n: int
    flip_x: bool = False
    flip_y: bool = False
    exchange: bool = False


_ACTION_FLAGS: dict[str, tuple[bool, bool, bool]] = {
    "e": (False, False, False),
    "tx": (True, False, False),
    "ty": (False, True, False),
    "r2": (True, True, False),
    "r": (True, False, True),
    "r3": (False, True, True),
    "d1": (True, True, True),
    "d2": (False, False, True),
}


def register_action(g: GroupElement, n: int) -> RegisterAction:
    fx, fy, ex = _ACTION_FLAGS[g.label]
    return RegisterAction(n, fx, fy, ex)


def conjugate_pauli(p: SignedPauliString, action: RegisterAction) -> SignedPauliString:
    """V† P V for a structured p4m action V, as a signed Pauli word.

    X layers flip the sign once per Y or Z factor on a flipped qubit;
    the register exchange relabels qubit q to q +/- n.
    """
    n = action.n
    sign = p.sign
    factors: dict[int, str] = {}
    for q, letter in p.factors:
        if q >= 2 * n:
            raise ValueError(f"qubit {q} outside the 2n = {2 * n} qubit layout")
        in_x = q < n
        if letter in ("Y", "Z") and ((action.flip_x and in_x) or (action.flip_y and not in_x)):
            sign = -sign
        q2 = (q + n if in_x else q - n) if action.exchange else q
        factors[q2] = letter
    return SignedPauliString.from_map(factors, sign)


def twirl(p: SignedPauliString,
          actions: list[RegisterAction]) -> list[tuple[float, SignedPauliString]]:
    """Average of V† P V over the given actions, collected by Pauli word.

    Returns (coefficient, word) terms with positive-sign words, sorted,
    zero terms dropped; the empty list is the zero operator.
    """
    acc: dict[tuple, float] = {}
    for action in actions:
        c = conjugate_pauli(p, action)
        acc[c.factors] = acc.get(c.factors, 0.0) + c.sign
    terms = []
    for factors, total in sorted(acc.items()):
        coeff = total / len(actions)
        if coeff != 0.0:
            terms.append((coeff, SignedPauliString(1, factors)))
    return terms


def subgroup_actions(name: str, n: int) -> list[RegisterAction]:
    """Named closed subgroups used by the twirl CLI."""
    groups = {
        "x-flip": ("e", "tx"),
        "y-flip": ("e", "ty"),
        "flips": ("e", "tx", "ty", "r2"),
        "rotations": ("e", "r", "r2", "r3"),
        "full": GROUP_LABELS,
    }
    try:
        labels = groups[name]
    except KeyError:
        raise ValueError(f"unknown group spec {name!r}; expected one of {sorted(groups)}")
    return [register_action(element(label), n) for label in labels]


def is_equivariant_generator(p: SignedPauliString, n: int) -> bool:
    """Whether p commutes with the X layers on both registers.

    Equivalent to an even count of Y/Z factors on each register; the
    register exchange is handled at circuit level by mirror-sharing.
    """
    count_x = count_y = 0
    for q, letter in p.factors:
        if q >= 2 * n:
            raise ValueError(f"qubit {q} outside the 2n = {2 * n} qubit layout")
        if letter in ("Y", "Z"):
            if q < n:
                count_x += 1
            else:
                count_y += 1
    return count_x % 2 == 0 and count_y % 2 == 0


def enumerate_equivariant_gateset(support, n: int, max_weight: int,
                                  identical_pairs: bool = False) -> list[SignedPauliString]:
    """All Pauli words on ``support`` commuting with both register X layers.

    Deterministic lexicographic order. With ``identical_pairs`` the
    support must be a mirrored quad (i, j, i+n, j+n) and only the
    weight-4 words with one letter per register pair are kept.
    """
    support = sorted(set(support))
    if len(support) > 4:
        raise ValueError(f"support {support} exceeds the 4-qubit bound")
    if max_weight > 4:
        raise ValueError(f"max_weight {max_weight} exceeds the 4-qubit bound")
    if identical_pairs:
        if len(support) != 4 or (
            support[2] != support[0] + n or support[3] != support[1] + n
        ):
            raise ValueError(f"support {support} is not a mirrored quad (i, j, i+n, j+n)")
    words = []
    for weight in range(1, min(max_weight, len(support)) + 1):
        for qubits in combinations(support, weight):
            for letters in product("XYZ", repeat=weight):
                word = SignedPauliString.from_map(dict(zip(qubits, letters)))
                if not is_equivariant_generator(word, n):
                    continue
                if identical_pairs:
                    if weight != 4:
                        continue
                    if word.letter(support[0]) != word.letter(support[1]):
                        continue
                    if word.letter(support[2]) != word.letter(support[3]):
                        continue
                words.append(word)
    return sorted(words, key=lambda w: w.factors)


# ---------------------------------------------------------------------------
# Numerical equivariance audit

@dataclass
class AuditReport:
    """Per-element maximal commutation defects of a parameterized circuit."""

    tolerance: float
    defects: dict[str, float]

    @property
    def equivariant(self) -> bool:
        return all(d < self.tolerance for d in self.defects.values())

    def failing(self) -> list[str]:
        return [label for label, d in self.defects.items() if d >= self.tolerance]

    def format_table(self) -> str:
        lines = ["element  max_defect  equivariant"]
        for label in GROUP_LABELS:
            d = self.defects[label]
            lines.append(f"{label:<7}  {d:.3e}   {'yes' if d < self.tolerance else 'NO'}")
        return "\n".join(lines)


def audit_circuit(circuit, n: int, num_param_sets: int = 20, seed: int = 7,
                  freeze_slots: tuple[int, ...] = ()) -> AuditReport:
    """Check U(theta) V[g] = V[g] U(theta) on random states, all 8 elements.

    ``freeze_slots`` pins the listed parameter indices to zero (used to
    audit the approximately equivariant model with its bridge off).
    """
    if circuit.num_qubits != 2 * n:
        raise ValueError(f"circuit has {circuit.num_qubits} qubits, expected {2 * n}")
    rng = np.random.default_rng(seed)
    reps = group_elements(n)
    dim = 1 << circuit.num_qubits
    defects = {g.label: 0.0 for g, _ in reps}
    for _ in range(num_param_sets):
        params = rng.uniform(-np.pi, np.pi, circuit.num_params)
        for idx in freeze_slots:
            params[idx] = 0.0
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        u_psi = psi.copy()
        run_gates(u_psi, circuit.num_qubits, circuit.gates, params, circuit.sharing)
        for g, perm in reps:
            left = perm.apply_to_amps(u_psi)
            right = perm.apply_to_amps(psi)
            run_gates(right, circuit.num_qubits, circuit.gates, params, circuit.sharing)
            defect = float(np.max(np.abs(left - right)))
            if defect > defects[g.label]:
                defects[g.label] = defect
    return AuditReport(EQUIV_TOL, defects)
