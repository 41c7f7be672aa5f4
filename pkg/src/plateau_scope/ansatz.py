"""Block/layer structure of the ansatz and causal-cone computation.

A layout is pure combinatorics: blocks with qubit sets arranged in layers,
applied to |0...0> in ascending (layer, id) order.  Gate contents live in
the simulator; here we only need which qubits each block touches.  The
causal cone of a Pauli string is found by a backward sweep over layers:
starting from the string's support, a block joins the cone iff it
intersects the active qubit set, and then contributes its qubits to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

from .paulis import PauliString


@dataclass(frozen=True)
class Block:
    """One ansatz block: an id, the qubits it acts on, and its layer (1-based)."""

    id: int
    qubits: tuple[int, ...]
    layer: int

    def __post_init__(self) -> None:
        if not self.qubits:
            raise ValueError("block must act on at least one qubit")
        object.__setattr__(self, "qubits", tuple(sorted(set(self.qubits))))


@dataclass(frozen=True)
class AnsatzLayout:
    n_qubits: int
    blocks: tuple[Block, ...]
    layer_count: int

    def block(self, block_id: int) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(f"unknown block id {block_id}")

    def application_order(self) -> list[Block]:
        """Blocks in the order they are applied to |0...0>."""
        return sorted(self.blocks, key=lambda b: (b.layer, b.id))


@dataclass(frozen=True)
class CausalCone:
    """Blocks that survive in U^dagger h U, plus the qubits they reach."""

    blocks: frozenset[int]
    qubits: frozenset[int]


def validate(layout: AnsatzLayout) -> list[str]:
    """Return all violated layout invariants; an empty list means ok.

    Checks index bounds, unique block ids, in-layer disjointness, and that
    the blocks of the whole circuit jointly cover every qubit (uncovered
    qubits would make the decoupling argument inapplicable).
    """
    problems: list[str] = []
    seen_ids = set()
    per_layer: dict[int, list[Block]] = {}
    covered: set[int] = set()
    for b in layout.blocks:
        if b.id in seen_ids:
            problems.append(f"duplicate block id {b.id}")
        seen_ids.add(b.id)
        if not 1 <= b.layer <= layout.layer_count:
            problems.append(f"block {b.id}: layer {b.layer} outside [1, {layout.layer_count}]")
        bad = [q for q in b.qubits if not 0 <= q < layout.n_qubits]
        if bad:
            problems.append(f"block {b.id}: qubit indices {bad} out of range")
        per_layer.setdefault(b.layer, []).append(b)
        covered.update(b.qubits)
    for layer, blocks in sorted(per_layer.items()):
        used: set[int] = set()
        for b in blocks:
            overlap = used.intersection(b.qubits)
            if overlap:
                problems.append(
                    f"layer {layer}: block {b.id} shares qubits {sorted(overlap)} "
                    "with an earlier block in the same layer"
                )
            used.update(b.qubits)
    uncovered = set(range(layout.n_qubits)) - covered
    if uncovered:
        problems.append(f"qubits {sorted(uncovered)} not covered by any block")
    return problems


def make_checkerboard(n: int, layers: int, topology: str = "line") -> AnsatzLayout:
    """Brick-layer ansatz: odd layers pair (0,1),(2,3),...; even layers shift by one.

    Ring topology closes even layers with the (n-1, 0) pair; on a line the
    boundary qubits sit out of even layers.
    """
    if n < 2 or n % 2 != 0:
        raise ValueError(f"checkerboard needs an even qubit count >= 2, got {n}")
    if layers < 1:
        raise ValueError(f"need at least one layer, got {layers}")
    if topology not in ("line", "ring"):
        raise ValueError(f"topology must be 'line' or 'ring', got {topology!r}")
    blocks: list[Block] = []
    next_id = 1
    for layer in range(1, layers + 1):
        if layer % 2 == 1:
            pairs = [(i, i + 1) for i in range(0, n - 1, 2)]
        else:
            pairs = [(i, i + 1) for i in range(1, n - 1, 2)]
            if topology == "ring":
                pairs.append((n - 1, 0))
        for pair in pairs:
            blocks.append(Block(next_id, pair, layer))
            next_id += 1
    return AnsatzLayout(n, tuple(blocks), layers)


def causal_cone(h: PauliString, layout: AnsatzLayout) -> CausalCone:
    """Backward sweep from the last layer over a growing active qubit set."""
    if h.n_qubits != layout.n_qubits:
        raise ValueError(
            f"string acts on {h.n_qubits} qubits but layout has {layout.n_qubits}"
        )
    active = set(h.support())
    members: set[int] = set()
    qubits: set[int] = set(active)
    for block in sorted(layout.blocks, key=lambda b: (b.layer, b.id), reverse=True):
        if active.intersection(block.qubits):
            members.add(block.id)
            active.update(block.qubits)
            qubits.update(block.qubits)
    return CausalCone(frozenset(members), frozenset(qubits))


def cone_contains(h: PauliString, layout: AnsatzLayout, block_id: int) -> bool:
    layout.block(block_id)
    return block_id in causal_cone(h, layout).blocks


def layout_from_json(obj: dict[str, Any]) -> AnsatzLayout:
    """Build a layout from its JSON form or the checkerboard shortcut."""
    if "checkerboard" in obj:
        spec = obj["checkerboard"]
        return make_checkerboard(
            int(spec["n"]), int(spec["layers"]), spec.get("topology", "line")
        )
    blocks = tuple(
        Block(int(b["id"]), tuple(int(q) for q in b["qubits"]), int(b["layer"]))
        for b in obj["blocks"]
    )
    return AnsatzLayout(int(obj["n"]), blocks, int(obj["layers"]))


def layout_to_json(layout: AnsatzLayout) -> dict[str, Any]:
    return {
        "n": layout.n_qubits,
        "layers": layout.layer_count,
        "blocks": [
            {"id": b.id, "layer": b.layer, "qubits": list(b.qubits)}
            for b in layout.application_order()
        ],
    }
