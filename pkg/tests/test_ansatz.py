"""Layout validation, checkerboard construction, and causal cones."""

import numpy as np
import pytest

from plateau_scope.ansatz import (
    AnsatzLayout,
    Block,
    causal_cone,
    cone_contains,
    layout_from_json,
    layout_to_json,
    make_checkerboard,
    validate,
)
from plateau_scope.paulis import PauliString


def fig1_layout():
    # 6 qubits, 3 layers: G1..G3 | G4, G5 | G6..G8
    return make_checkerboard(6, 3, "line")


class TestValidate:
    def test_fig1_ok(self):
        assert validate(fig1_layout()) == []

    def test_in_layer_overlap(self):
        layout = AnsatzLayout(
            3, (Block(1, (0, 1), 1), Block(2, (1, 2), 1)), 1
        )
        problems = validate(layout)
        assert any("shares qubits [1]" in p for p in problems)

    def test_uncovered_qubits(self):
        layout = AnsatzLayout(4, (Block(1, (0, 1), 1),), 1)
        problems = validate(layout)
        assert any("[2, 3]" in p for p in problems)

    def test_index_bounds_and_duplicate_ids(self):
        layout = AnsatzLayout(
            2, (Block(1, (0, 5), 1), Block(1, (0, 1), 2)), 1
        )
        problems = validate(layout)
        assert any("out of range" in p for p in problems)
        assert any("duplicate block id" in p for p in problems)
        assert any("outside [1, 1]" in p for p in problems)


class TestCheckerboard:
    def test_fig1_structure(self):
        layout = fig1_layout()
        got = {b.id: (b.layer, b.qubits) for b in layout.blocks}
        assert got == {
            1: (1, (0, 1)),
            2: (1, (2, 3)),
            3: (1, (4, 5)),
            4: (2, (1, 2)),
            5: (2, (3, 4)),
            6: (3, (0, 1)),
            7: (3, (2, 3)),
            8: (3, (4, 5)),
        }

    def test_minimal(self):
        layout = make_checkerboard(2, 1)
        assert len(layout.blocks) == 1 and layout.blocks[0].qubits == (0, 1)

    def test_ring_counts(self):
        layout = make_checkerboard(10, 5, "ring")
        assert len(layout.blocks) == 25
        per_layer = {}
        for b in layout.blocks:
            per_layer[b.layer] = per_layer.get(b.layer, 0) + 1
        assert per_layer == {1: 5, 2: 5, 3: 5, 4: 5, 5: 5}
        assert validate(layout) == []

    def test_ring_closure_block(self):
        layout = make_checkerboard(6, 2, "ring")
        layer2 = [b.qubits for b in layout.blocks if b.layer == 2]
        assert (0, 5) in layer2

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            make_checkerboard(5, 2)
        with pytest.raises(ValueError):
            make_checkerboard(4, 0)
        with pytest.raises(ValueError):
            make_checkerboard(4, 1, "torus")


class TestCausalCone:
    def test_fig1_example(self):
        cone = causal_cone(PauliString.from_label("IIXIII"), fig1_layout())
        assert cone.blocks == frozenset({1, 2, 3, 4, 5, 7})
        assert cone.qubits == frozenset(range(6))

    def test_trivial_string_empty_cone(self):
        cone = causal_cone(PauliString.identity(6), fig1_layout())
        assert cone.blocks == frozenset() and cone.qubits == frozenset()

    def test_single_layer_single_block(self):
        layout = make_checkerboard(6, 1)
        cone = causal_cone(PauliString.from_label("XIIIII"), layout)
        assert cone.blocks == frozenset({1})
        assert cone.qubits == frozenset({0, 1})

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            causal_cone(PauliString.identity(4), fig1_layout())

    def test_cone_contains_fig1(self):
        h = PauliString.from_label("IIXIII")
        assert not cone_contains(h, fig1_layout(), 6)
        assert cone_contains(h, fig1_layout(), 7)
        with pytest.raises(KeyError):
            cone_contains(h, fig1_layout(), 99)

    def test_last_layer_intersection_always_in_cone(self):
        layout = fig1_layout()
        h = PauliString.from_label("IIIIXI")
        assert cone_contains(h, layout, 8)  # layer-3 block on {4,5}

    def test_monotone_in_support(self):
        rng = np.random.default_rng(5)
        layout = make_checkerboard(10, 4, "ring")
        for _ in range(25):
            qubits = rng.choice(10, size=rng.integers(1, 4), replace=False)
            small = PauliString.from_map(10, {int(q): "X" for q in qubits})
            extra = set(qubits) | {int(rng.integers(0, 10))}
            big = PauliString.from_map(10, {q: "X" for q in extra})
            small_cone = causal_cone(small, layout)
            big_cone = causal_cone(big, layout)
            assert small_cone.blocks <= big_cone.blocks

    def test_cone_blocks_form_causal_path(self):
        # every cone block must reach the support through intersecting
        # cone blocks of strictly later layers
        rng = np.random.default_rng(6)
        for trial in range(20):
            n = int(rng.choice([6, 8, 10]))
            layers = int(rng.integers(1, 5))
            layout = make_checkerboard(n, layers, rng.choice(["line", "ring"]))
            q = int(rng.integers(0, n))
            h = PauliString.from_map(n, {q: "Z"})
            cone = causal_cone(h, layout)
            members = {b.id: layout.block(b.id) for b in layout.blocks if b.id in cone.blocks}
            connected = {
                bid
                for bid, b in members.items()
                if set(b.qubits) & set(h.support())
            }
            changed = True
            while changed:
                changed = False
                for bid, b in members.items():
                    if bid in connected:
                        continue
                    for cid in connected:
                        c = members[cid]
                        if c.layer > b.layer and set(c.qubits) & set(b.qubits):
                            connected.add(bid)
                            changed = True
                            break
            assert connected == set(members)

    def test_light_cone_speed(self):
        # cone qubits grow by at most 2 per layer per side
        for n in (8, 12):
            for layers in range(1, 7):
                layout = make_checkerboard(n, layers, "line")
                h = PauliString.from_map(n, {n // 2: "X"})
                sizes = []
                for upto in range(layers, 0, -1):
                    active = set(h.support())
                    for block in sorted(
                        layout.blocks, key=lambda b: (b.layer, b.id), reverse=True
                    ):
                        if block.layer < upto:
                            continue
                        if active & set(block.qubits):
                            active |= set(block.qubits)
                    sizes.append(len(active))
                assert all(b - a <= 4 for a, b in zip(sizes, sizes[1:]))


class TestJson:
    def test_round_trip(self):
        layout = fig1_layout()
        assert layout_from_json(layout_to_json(layout)) == layout

    def test_checkerboard_shortcut(self):
        obj = {"checkerboard": {"n": 10, "layers": 5, "topology": "ring"}}
        assert layout_from_json(obj) == make_checkerboard(10, 5, "ring")
