"""Exact gradient variance under the local-2-design assumption.

A super Pauli string that has passed through a mixing operator has its
letters uniformly distributed over {X, Y, Z} on its support, so the full
4^n-dimensional bookkeeping collapses to a distribution over support
patterns (bitmasks).  A mixer on qubit set Y redistributes the mass of
every overlapping pattern over (S \\ Y) union T for all nonempty T in Y
with weight 3^|T| / (4^|Y| - 1); the differentiated block additionally
deletes patterns disjoint from Y and multiplies the survivors by
2 * 4^|Y| / (4^|Y| - 1).  Reading out against |0...0> turns each pattern
into (1/3)^|S|: the probability that every uniformly random non-identity
letter on S is a Z.

Weights are floats by default; ``exact=True`` switches the whole pipeline
to ``fractions.Fraction`` so small instances can be checked in rational
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .ansatz import AnsatzLayout, causal_cone, validate
from .paulis import Hamiltonian, PauliString

PRUNE_THRESHOLD = 1e-15


@dataclass(frozen=True)
class SupportDistribution:
    """Nonnegative mass per support-pattern bitmask (bit q = qubit q)."""

    n_qubits: int
    weights: dict[int, float | Fraction]

    def total_mass(self):
        return sum(self.weights.values())


@dataclass(frozen=True)
class DiffSpec:
    """Which block carries the differentiated gate, and its Pauli generator.

    The generator must be a nontrivial Pauli string supported inside the
    block; its identity is validated but never enters the arithmetic (the
    sandwiched-commutator constant is generator-independent).
    """

    block_id: int
    generator: PauliString

    def check(self, layout: AnsatzLayout) -> None:
        block = layout.block(self.block_id)
        if self.generator.n_qubits != layout.n_qubits:
            raise ValueError("generator size does not match layout")
        if self.generator.is_trivial():
            raise ValueError("generator must be a nontrivial Pauli string")
        if not self.generator.support() <= frozenset(block.qubits):
            raise ValueError(
                f"generator support {sorted(self.generator.support())} not inside "
                f"block {self.block_id} qubits {list(block.qubits)}"
            )


def _mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def _subset_masks(mask: int) -> list[tuple[int, int]]:
    """All nonempty submasks of `mask` with their popcounts."""
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    out = []
    for sel in range(1, 1 << len(bits)):
        sub = 0
        size = 0
        for j, bit in enumerate(bits):
            if sel >> j & 1:
                sub |= bit
                size += 1
        out.append((sub, size))
    return out


def lift(h: PauliString, exact: bool = False) -> SupportDistribution:
    """Singleton distribution on the string's support pattern."""
    one = Fraction(1) if exact else 1.0
    return SupportDistribution(h.n_qubits, {_mask(h.support()): one})


def apply_mixer(d: SupportDistribution, qubits: Iterable[int]) -> SupportDistribution:
    """Mixing operator on qubit set Y; preserves total mass exactly."""
    y = tuple(set(qubits))
    if not y:
        raise ValueError("mixer qubit set must be nonempty")
    if any(not 0 <= q < d.n_qubits for q in y):
        raise ValueError(f"mixer qubits {y} out of range")
    return _redistribute(d, y, factor=None, drop_disjoint=False)


def apply_diff_block(d: SupportDistribution, qubits: Iterable[int]) -> SupportDistribution:
    """Sandwiched commutator at the differentiated block on qubit set Y.

    Patterns disjoint from Y commute with the generator and vanish; the
    rest gain the constant 2 * 4^|Y| / (4^|Y| - 1) and are remixed.
    """
    y = tuple(set(qubits))
    if not y:
        raise ValueError("differentiated block qubit set must be nonempty")
    exact = any(isinstance(w, Fraction) for w in d.weights.values())
    denom = 4 ** len(y) - 1
    factor = (
        Fraction(2 * 4 ** len(y), denom) if exact else 2 * 4 ** len(y) / denom
    )
    return _redistribute(d, y, factor=factor, drop_disjoint=True)


def _redistribute(
    d: SupportDistribution,
    y: tuple[int, ...],
    factor,
    drop_disjoint: bool,
) -> SupportDistribution:
    y_mask = _mask(y)
    denom = 4 ** len(y) - 1
    exact = any(isinstance(w, Fraction) for w in d.weights.values())
    if exact:
        shares = [(sub, Fraction(3**size, denom)) for sub, size in _subset_masks(y_mask)]
    else:
        shares = [(sub, 3**size / denom) for sub, size in _subset_masks(y_mask)]
    out: dict[int, float | Fraction] = {}
    for pattern, w in d.weights.items():
        if pattern & y_mask == 0:
            if not drop_disjoint:
                out[pattern] = out.get(pattern, 0) + w
            continue
        base = pattern & ~y_mask
        scaled = w * factor if factor is not None else w
        for sub, share in shares:
            key = base | sub
            out[key] = out.get(key, 0) + scaled * share
    if not exact:
        out = {p: w for p, w in out.items() if w >= PRUNE_THRESHOLD}
    return SupportDistribution(d.n_qubits, out)


def measure_zero_state(d: SupportDistribution):
    """Overlap with |0...0><0...0| on both copies: sum of w(S) * (1/3)^|S|."""
    if not d.weights:
        return 0
    exact = any(isinstance(w, Fraction) for w in d.weights.values())
    total = Fraction(0) if exact else 0.0
    for pattern, w in d.weights.items():
        k = bin(pattern).count("1")
        total += w * (Fraction(1, 3**k) if exact else 3.0**-k)
    return total


def _propagate(
    h: PauliString,
    layout: AnsatzLayout,
    diff: DiffSpec,
    exact: bool,
):
    """Variance contribution of a single Pauli string (unit coefficient)."""
    d = lift(h, exact=exact)
    for block in reversed(layout.application_order()):
        if block.id == diff.block_id:
            d = apply_diff_block(d, block.qubits)
        else:
            d = apply_mixer(d, block.qubits)
    return measure_zero_state(d)


def exact_variance(
    H: Hamiltonian,
    layout: AnsatzLayout,
    diff: DiffSpec,
    exact: bool = False,
):
    """Exact Var of the derivative of <H> w.r.t. the differentiated block.

    Distinct Pauli strings decouple, so each term is propagated on its own
    and summed with weight c_i^2.  Strings whose causal cone excludes the
    differentiated block contribute exactly zero and are skipped.
    """
    problems = validate(layout)
    if problems:
        raise ValueError("invalid layout: " + "; ".join(problems))
    diff.check(layout)
    total = Fraction(0) if exact else 0.0
    for coeff, h in H.terms:
        if diff.block_id not in causal_cone(h, layout).blocks:
            continue
        c2 = Fraction(coeff) ** 2 if exact else coeff * coeff
        total += c2 * _propagate(h, layout, diff, exact)
    return total


def theorem_bound(
    H: Hamiltonian,
    layout: AnsatzLayout,
    diff: DiffSpec,
    exact: bool = False,
):
    """Closed-form lower bound on the exact variance.

    (2 * 4^|Y_k| / (4^|Y_k| - 1)) * (3/4)^(l - l_c) * sum c_i^2 * 3^(-n_cc),
    summing only the strings whose causal cone contains the block.
    """
    problems = validate(layout)
    if problems:
        raise ValueError("invalid layout: " + "; ".join(problems))
    diff.check(layout)
    block = layout.block(diff.block_id)
    m = len(block.qubits)
    depth = layout.layer_count - block.layer
    if exact:
        prefactor = Fraction(2 * 4**m, 4**m - 1) * Fraction(3, 4) ** depth
        total = Fraction(0)
    else:
        prefactor = 2 * 4**m / (4**m - 1) * 0.75**depth
        total = 0.0
    for coeff, h in H.terms:
        cone = causal_cone(h, layout)
        if diff.block_id not in cone.blocks:
            continue
        n_cc = len(cone.qubits)
        c2 = Fraction(coeff) ** 2 if exact else coeff * coeff
        total += c2 * (Fraction(1, 3**n_cc) if exact else 3.0**-n_cc)
    return prefactor * total


def variance_heatmap(
    H: Hamiltonian,
    layout: AnsatzLayout,
    mode: str = "bound",
    generator_letter: str = "Z",
    exact: bool = False,
) -> dict[int, float | Fraction]:
    """Per-block variance values: `mode` picks theorem_bound or exact_variance.

    The generator is fixed per block as `generator_letter` on the block's
    first qubit (it never affects the numbers, only validation).
    """
    if mode not in ("bound", "exact"):
        raise ValueError(f"mode must be 'bound' or 'exact', got {mode!r}")
    fn = theorem_bound if mode == "bound" else exact_variance
    out: dict[int, float | Fraction] = {}
    for block in layout.application_order():
        gen = PauliString.from_map(layout.n_qubits, {block.qubits[0]: generator_letter})
        out[block.id] = fn(H, layout, DiffSpec(block.id, gen), exact=exact)
    return out
