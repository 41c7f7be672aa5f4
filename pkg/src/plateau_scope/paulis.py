"""Sparse Pauli-string algebra: products, commutation, supports, dense export.

Strings are stored sparsely as (qubit, letter) pairs so that support and
causal-cone queries cost O(weight) even when the register is large.  The
text form is a length-n word over {I, X, Y, Z} with qubit 0 leftmost; the
dense form is the Kronecker product in qubit-index order, qubit 0 most
significant.  All values are immutable and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np

_LETTERS = ("X", "Y", "Z")

# Single-qubit products: (a, b) -> (phase, letter), identities handled separately.
_MUL_1Q = {
    ("X", "X"): (1, "I"),
    ("Y", "Y"): (1, "I"),
    ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}

_MATS_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

DENSE_QUBIT_CAP = 12


@dataclass(frozen=True)
class PauliString:
    """A sparse n-qubit Pauli string; absent qubits carry the identity."""

    n_qubits: int
    letters: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        seen = set()
        for q, letter in self.letters:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit index {q} out of range [0, {self.n_qubits})")
            if letter not in _LETTERS:
                raise ValueError(f"invalid Pauli letter {letter!r}")
            if q in seen:
                raise ValueError(f"duplicate qubit index {q}")
            seen.add(q)
        object.__setattr__(self, "letters", tuple(sorted(self.letters)))

    @classmethod
    def from_map(cls, n_qubits: int, letters: Mapping[int, str]) -> "PauliString":
        return cls(n_qubits, tuple(letters.items()))

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a length-n word over {I,X,Y,Z}; qubit 0 is the leftmost character."""
        if not label:
            raise ValueError("empty Pauli label")
        pairs = []
        for q, ch in enumerate(label):
            if ch == "I":
                continue
            if ch not in _LETTERS:
                raise ValueError(f"invalid character {ch!r} in Pauli label {label!r}")
            pairs.append((q, ch))
        return cls(len(label), tuple(pairs))

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    def letter(self, qubit: int) -> str:
        for q, letter in self.letters:
            if q == qubit:
                return letter
        return "I"

    def support(self) -> frozenset[int]:
        """Qubits on which the string acts nontrivially."""
        return frozenset(q for q, _ in self.letters)

    @property
    def weight(self) -> int:
        return len(self.letters)

    def is_trivial(self) -> bool:
        return not self.letters

    def is_diagonal(self) -> bool:
        """True iff every stored letter is Z (trivial strings count as diagonal)."""
        return all(letter == "Z" for _, letter in self.letters)

    def commutes(self, other: "PauliString") -> bool:
        """True iff the number of sites with differing non-identity letters is even."""
        _check_same_size(self, other)
        mine = dict(self.letters)
        clashes = sum(
            1 for q, letter in other.letters if q in mine and mine[q] != letter
        )
        return clashes % 2 == 0

    def mul(self, other: "PauliString") -> "PhasedString":
        """Sitewise product self*other with the accumulated fourth-root phase."""
        _check_same_size(self, other)
        mine = dict(self.letters)
        phase: complex = 1
        out = dict(self.letters)
        for q, letter in other.letters:
            a = mine.get(q)
            if a is None:
                out[q] = letter
            elif a == letter:
                del out[q]
                phase *= 1
            else:
                p, res = _MUL_1Q[(a, letter)]
                phase *= p
                out[q] = res
        return PhasedString(phase, PauliString.from_map(self.n_qubits, out))

    def to_label(self) -> str:
        mine = dict(self.letters)
        return "".join(mine.get(q, "I") for q in range(self.n_qubits))

    def to_matrix(self, max_qubits: int = DENSE_QUBIT_CAP) -> np.ndarray:
        """Dense 2^n x 2^n matrix, qubit 0 most significant Kronecker factor."""
        if self.n_qubits > max_qubits:
            raise ValueError(
                f"dense export capped at {max_qubits} qubits, got {self.n_qubits}"
            )
        m = np.ones((1, 1), dtype=complex)
        mine = dict(self.letters)
        for q in range(self.n_qubits):
            m = np.kron(m, _MATS_1Q[mine.get(q, "I")])
        return m

    def __repr__(self) -> str:
        return f"PauliString({self.to_label()!r})"


class PhasedString(NamedTuple):
    """A Pauli string with one of the four fourth-root-of-unity phases."""

    phase: complex
    string: PauliString


def pauli_mul(a: PauliString, b: PauliString) -> PhasedString:
    return a.mul(b)


def commutes(a: PauliString, b: PauliString) -> bool:
    return a.commutes(b)


def support(h: PauliString) -> frozenset[int]:
    return h.support()


def _check_same_size(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"qubit-count mismatch: {a.n_qubits} vs {b.n_qubits}"
        )


@dataclass(frozen=True)
class Hamiltonian:
    """Weighted sum of distinct Pauli strings with finite real coefficients."""

    n_qubits: int
    terms: tuple[tuple[float, PauliString], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for coeff, string in self.terms:
            if not math.isfinite(coeff) or coeff == 0:
                raise ValueError(f"coefficient must be finite and nonzero, got {coeff}")
            if string.n_qubits != self.n_qubits:
                raise ValueError("term size does not match Hamiltonian size")
            if string.letters in seen:
                raise ValueError(f"duplicate term {string.to_label()}")
            seen.add(string.letters)

    @classmethod
    def from_terms(
        cls, n_qubits: int, terms: Iterable[tuple[float, PauliString]]
    ) -> "Hamiltonian":
        return cls(n_qubits, tuple((float(c), s) for c, s in terms))

    def to_text(self) -> str:
        return "".join(f"{c!r} {s.to_label()}\n" for c, s in self.terms)

    def __add__(self, other: "Hamiltonian") -> "Hamiltonian":
        if self.n_qubits != other.n_qubits:
            raise ValueError("cannot add Hamiltonians of different sizes")
        combined: dict[tuple, list] = {}
        for c, s in self.terms + other.terms:
            entry = combined.setdefault(s.letters, [0.0, s])
            entry[0] += c
        terms = tuple(
            (c, s) for c, s in combined.values() if c != 0.0
        )
        return Hamiltonian(self.n_qubits, terms)


def parse_hamiltonian(text: str, n_qubits: int | None = None) -> Hamiltonian:
    """Parse the text form: one `<coefficient> <label>` term per line.

    An all-blank text is the zero Hamiltonian and requires an explicit
    ``n_qubits``.
    """
    terms: list[tuple[float, PauliString]] = []
    n = n_qubits
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<coefficient> <label>'")
        try:
            coeff = float(parts[0])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad coefficient {parts[0]!r}") from exc
        string = PauliString.from_label(parts[1])
        if n is None:
            n = string.n_qubits
        elif string.n_qubits != n:
            raise ValueError(f"line {lineno}: string length does not match {n} qubits")
        terms.append((coeff, string))
    if n is None:
        raise ValueError("empty Hamiltonian text and no qubit count given")
    return Hamiltonian.from_terms(n, terms)
