"""Signed Pauli words: generators of every rotation gate in the simulator."""

from __future__ import annotations

from dataclasses import dataclass

_LETTERS = ("X", "Y", "Z")


@dataclass(frozen=True)
class SignedPauliString:
    """A Pauli word with a +/-1 sign, acting as identity on unlisted qubits.

    ``factors`` maps qubit index to a letter in {X, Y, Z}, stored as a
    sorted tuple of (qubit, letter) pairs so strings are hashable and
    comparable.
    """

    sign: int = 1
    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        ordered = tuple(sorted(self.factors))
        qubits = [q for q, _ in ordered]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate qubit in Pauli word: {qubits}")
        for q, letter in ordered:
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
            if letter not in _LETTERS:
                raise ValueError(f"invalid Pauli letter {letter!r}")
        object.__setattr__(self, "factors", ordered)

    @classmethod
    def from_map(cls, factors: dict[int, str], sign: int = 1) -> "SignedPauliString":
        return cls(sign, tuple(factors.items()))

    @property
    def weight(self) -> int:
        return len(self.factors)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def word(self) -> "SignedPauliString":
        """The same letters with the sign stripped to +1."""
        return SignedPauliString(1, self.factors) if self.sign != 1 else self

    def letter(self, qubit: int) -> str | None:
        for q, letter in self.factors:
            if q == qubit:
                return letter
        return None

    def masks(self, num_qubits: int) -> tuple[int, int, complex]:
        """Bit masks and phase driving the kernel-level application.

        Basis indices are big-endian: qubit k owns bit (num_qubits-1-k).
        Returns (flip_mask, yz_mask, base_phase) such that the word maps
        |b> to base_phase * (-1)**popcount(b & yz_mask) |b ^ flip_mask>.
        """
        flip = 0
        yz = 0
        n_y = 0
        for q, letter in self.factors:
            if q >= num_qubits:
                raise ValueError(f"qubit {q} out of range for {num_qubits} qubits")
            bit = 1 << (num_qubits - 1 - q)
            if letter == "X":
                flip |= bit
            elif letter == "Y":
                flip |= bit
                yz |= bit
                n_y += 1
            else:
                yz |= bit
        base = complex(self.sign) * (1j) ** (n_y % 4)
        return flip, yz, base

    def __str__(self) -> str:
        body = "".join(f"{letter}{q}" for q, letter in self.factors) or "I"
        return ("-" if self.sign < 0 else "") + body


def parse_pauli_word(text: str) -> SignedPauliString:
    """Parse words like ``Y0Y1`` or ``-Z2X10``; errors name the offset."""
    s = text.strip()
    if not s:
        raise ValueError("empty Pauli word")
    sign = 1
    pos = 0
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        pos = 1
    factors: dict[int, str] = {}
    while pos < len(s):
        letter = s[pos].upper()
        if letter not in _LETTERS:
            raise ValueError(f"invalid Pauli letter {s[pos]!r} at position {pos} in {text!r}")
        pos += 1
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise ValueError(f"missing qubit index at position {start} in {text!r}")
        qubit = int(s[start:pos])
        if qubit in factors:
            raise ValueError(f"qubit {qubit} repeated at position {start} in {text!r}")
        factors[qubit] = letter
    return SignedPauliString.from_map(factors, sign)
