"""Support-pattern propagation and the closed-form bound.

The mixer redistribution weights are checked against their independent
oracle: explicit enumeration of the nontrivial Pauli substrings on the
mixed qubit set, bucketed by support.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instancegen import random_instance
from plateau_scope.ansatz import make_checkerboard
from plateau_scope.design import (
    DiffSpec,
    SupportDistribution,
    apply_diff_block,
    apply_mixer,
    exact_variance,
    lift,
    measure_zero_state,
    theorem_bound,
    variance_heatmap,
)
from plateau_scope.paulis import Hamiltonian, PauliString, parse_hamiltonian


def enumerate_mixer_shares(y_qubits):
    """Oracle for the redistribution: bucket the 4^|Y|-1 nontrivial substrings."""
    buckets = {}
    for letters in itertools.product("IXYZ", repeat=len(y_qubits)):
        if all(ch == "I" for ch in letters):
            continue
        mask = 0
        for q, ch in zip(y_qubits, letters):
            if ch != "I":
                mask |= 1 << q
        buckets[mask] = buckets.get(mask, 0) + 1
    total = 4 ** len(y_qubits) - 1
    return {mask: Fraction(count, total) for mask, count in buckets.items()}


class TestLift:
    def test_examples(self):
        assert lift(PauliString.from_label("ZZ")).weights == {0b11: 1.0}
        assert lift(PauliString.identity(3)).weights == {0: 1.0}
        h = PauliString.from_map(10, {0: "X", 5: "Z"})
        assert lift(h).weights == {(1 << 0) | (1 << 5), 1.0}.__class__((((1 << 0) | (1 << 5), 1.0),))


class TestMixer:
    def test_full_overlap_matches_enumeration(self):
        d = lift(PauliString.from_label("XX"), exact=True)
        out = apply_mixer(d, (0, 1))
        assert out.weights == enumerate_mixer_shares((0, 1))
        assert out.weights[0b01] == Fraction(3, 15)
        assert out.weights[0b10] == Fraction(3, 15)
        assert out.weights[0b11] == Fraction(9, 15)

    def test_disjoint_pattern_untouched(self):
        d = SupportDistribution(6, {1 << 5: 1.0})
        assert apply_mixer(d, (0, 1)).weights == {1 << 5: 1.0}

    def test_partial_hit_forgets_initial_qubit(self):
        d = SupportDistribution(2, {0b10: Fraction(1)})  # qubit 1 only
        out = apply_mixer(d, (0, 1))
        assert out.weights == enumerate_mixer_shares((0, 1))

    def test_three_qubit_mixer_shares(self):
        d = lift(PauliString.from_label("XIZ"), exact=True)
        out = apply_mixer(d, (0, 1, 2))
        assert out.weights == enumerate_mixer_shares((0, 1, 2))
        assert sum(out.weights.values()) == 1

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            apply_mixer(lift(PauliString.identity(2)), ())

    @given(
        st.dictionaries(st.integers(0, 15), st.floats(0.01, 5.0), min_size=1, max_size=8),
        st.sets(st.integers(0, 3), min_size=1, max_size=3),
    )
    @settings(max_examples=80)
    def test_mass_conservation(self, weights, y):
        d = SupportDistribution(4, dict(weights))
        out = apply_mixer(d, tuple(y))
        before, after = sum(weights.values()), sum(out.weights.values())
        assert abs(after - before) <= 1e-12 * before

    @given(
        st.dictionaries(st.integers(0, 15), st.floats(0.01, 5.0), min_size=1, max_size=8),
        st.sets(st.integers(0, 3), min_size=1, max_size=3),
    )
    @settings(max_examples=80)
    def test_idempotence(self, weights, y):
        once = apply_mixer(SupportDistribution(4, dict(weights)), tuple(y))
        twice = apply_mixer(once, tuple(y))
        assert set(once.weights) == set(twice.weights)
        for mask, w in once.weights.items():
            assert abs(twice.weights[mask] - w) <= 1e-12 * max(w, 1.0)


class TestDiffBlock:
    def test_identity_input_vanishes(self):
        d = SupportDistribution(2, {0: 1.0})
        assert apply_diff_block(d, (0, 1)).weights == {}

    def test_overlap_gets_commutator_factor(self):
        d = lift(PauliString.from_label("XX"), exact=True)
        out = apply_diff_block(d, (0, 1))
        factor = Fraction(32, 15)
        shares = enumerate_mixer_shares((0, 1))
        assert out.weights == {m: factor * s for m, s in shares.items()}

    def test_disjoint_pattern_deleted(self):
        d = SupportDistribution(6, {1 << 5: 1.0})
        assert apply_diff_block(d, (0, 1)).weights == {}


class TestMeasure:
    def test_trivial_pattern_scores_one(self):
        assert measure_zero_state(SupportDistribution(2, {0: 1.0})) == 1.0

    def test_two_qubit_pattern(self):
        value = measure_zero_state(SupportDistribution(2, {0b11: Fraction(1)}))
        assert value == Fraction(1, 9)

    def test_linearity(self):
        d = SupportDistribution(2, {0b01: 0.5, 0: 0.5})
        assert measure_zero_state(d) == pytest.approx(0.5 / 3 + 0.5)

    def test_diagonal_share_identity(self):
        # the mixer sends mass (2^|Y|-1)/(4^|Y|-1) to all-Z-or-identity readouts
        d = apply_mixer(lift(PauliString.from_label("ZZ"), exact=True), (0, 1))
        assert measure_zero_state(d) == Fraction(3, 15)


class TestExactVariance:
    def test_canonical_rational(self):
        layout = make_checkerboard(2, 1)
        H = parse_hamiltonian("1.0 ZZ")
        spec = DiffSpec(1, PauliString.from_label("ZI"))
        assert exact_variance(H, layout, spec, exact=True) == Fraction(32, 75)
        assert exact_variance(H, layout, spec) == pytest.approx(32 / 75, rel=1e-12)

    def test_trivial_string_contributes_zero(self):
        layout = make_checkerboard(4, 2)
        H = Hamiltonian.from_terms(4, [(1.0, PauliString.identity(4))])
        spec = DiffSpec(1, PauliString.from_label("ZIII"))
        assert exact_variance(H, layout, spec) == 0

    def test_block_outside_cone_is_exact_zero(self):
        layout = make_checkerboard(6, 3)
        H = parse_hamiltonian("1.0 IIXIII")
        spec = DiffSpec(6, PauliString.from_label("ZIIIII"))
        assert exact_variance(H, layout, spec) == 0

    def test_terms_decouple(self):
        layout = make_checkerboard(2, 1)
        H = parse_hamiltonian("1.0 XI\n2.0 IX")
        spec = DiffSpec(1, PauliString.from_label("ZI"))
        assert exact_variance(H, layout, spec, exact=True) == 5 * Fraction(32, 75)

    def test_generator_choice_is_irrelevant(self):
        layout = make_checkerboard(6, 2, "ring")
        H = parse_hamiltonian("0.8 IXIIII\n-1.1 IIZZII")
        for block_id in (1, 4):
            results = {
                exact_variance(
                    H,
                    layout,
                    DiffSpec(block_id, PauliString.from_map(6, letters)),
                )
                for letters in (
                    {layout.block(block_id).qubits[0]: "Z"},
                    {layout.block(block_id).qubits[1]: "X"},
                    {q: "Y" for q in layout.block(block_id).qubits},
                )
            }
            assert len(results) == 1  # bit-for-bit identical

    def test_empty_hamiltonian(self):
        layout = make_checkerboard(2, 1)
        H = Hamiltonian(2, ())
        spec = DiffSpec(1, PauliString.from_label("ZI"))
        assert exact_variance(H, layout, spec) == 0

    def test_rejects_bad_diff_specs(self):
        layout = make_checkerboard(4, 1)
        H = parse_hamiltonian("1.0 ZZII")
        with pytest.raises(KeyError):
            exact_variance(H, layout, DiffSpec(9, PauliString.from_label("ZIII")))
        with pytest.raises(ValueError):
            exact_variance(H, layout, DiffSpec(2, PauliString.from_label("ZIII")))
        with pytest.raises(ValueError):
            exact_variance(H, layout, DiffSpec(1, PauliString.identity(4)))


class TestTheoremBound:
    def test_canonical(self):
        layout = make_checkerboard(2, 1)
        H = parse_hamiltonian("1.0 ZZ")
        spec = DiffSpec(1, PauliString.from_label("ZI"))
        bound = theorem_bound(H, layout, spec, exact=True)
        assert bound == Fraction(32, 135)
        assert bound <= exact_variance(H, layout, spec, exact=True)

    def test_two_terms(self):
        layout = make_checkerboard(2, 1)
        H = parse_hamiltonian("1.0 XI\n2.0 IX")
        spec = DiffSpec(1, PauliString.from_label("ZI"))
        assert theorem_bound(H, layout, spec, exact=True) == Fraction(32, 27)

    def test_off_cone_empty_sum(self):
        layout = make_checkerboard(6, 3)
        H = parse_hamiltonian("1.0 IIXIII")
        spec = DiffSpec(6, PauliString.from_label("ZIIIII"))
        assert theorem_bound(H, layout, spec) == 0

    def test_layer_discount(self):
        # same block size and cone, one layer deeper: bound shrinks by 3/4
        H = parse_hamiltonian("1.0 XX")
        l1 = make_checkerboard(2, 1)
        l2 = make_checkerboard(2, 2)
        spec = DiffSpec(1, PauliString.from_label("ZI"))
        b1 = theorem_bound(H, l1, spec, exact=True)
        b2 = theorem_bound(H, l2, spec, exact=True)
        assert b2 == b1 * Fraction(3, 4)

    def test_dominated_by_exact_on_random_instances(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            layout, H, spec = random_instance(rng, max_n=8, max_layers=3)
            bound = theorem_bound(H, layout, spec)
            exact = exact_variance(H, layout, spec)
            assert bound <= exact + 1e-12


class TestHeatmap:
    def test_trivial_hamiltonian_all_zero(self):
        layout = make_checkerboard(4, 2)
        H = Hamiltonian.from_terms(4, [(1.0, PauliString.identity(4))])
        values = variance_heatmap(H, layout, mode="bound")
        assert set(values) == {b.id for b in layout.blocks}
        assert all(v == 0 for v in values.values())

    def test_single_layer_local_term(self):
        layout = make_checkerboard(4, 1)
        H = parse_hamiltonian("1.0 ZZII")
        values = variance_heatmap(H, layout, mode="exact")
        assert values[1] > 0
        assert values[2] == 0

    def test_cone_pattern_matches_membership(self):
        from plateau_scope.ansatz import causal_cone

        layout = make_checkerboard(10, 5, "ring")
        H = parse_hamiltonian("1.0 IIIIIXIIII")
        cone = causal_cone(H.terms[0][1], layout)
        for mode in ("bound", "exact"):
            values = variance_heatmap(H, layout, mode=mode)
            for block in layout.blocks:
                if block.id in cone.blocks:
                    assert values[block.id] > 0
                else:
                    assert values[block.id] == 0

    def test_rejects_unknown_mode(self):
        layout = make_checkerboard(2, 1)
        with pytest.raises(ValueError):
            variance_heatmap(Hamiltonian(2, ()), layout, mode="fancy")


class TestDecay:
    def test_global_string_decays_with_n(self):
        values = []
        for n in (4, 6, 8):
            layout = make_checkerboard(n, 2, "ring")
            H = Hamiltonian.from_terms(
                n, [(1.0, PauliString.from_map(n, {q: "X" for q in range(n)}))]
            )
            spec = DiffSpec(1, PauliString.from_map(n, {0: "Z"}))
            values.append(exact_variance(H, layout, spec))
        assert values[0] > values[1] > values[2] > 0
