"""Seeded random problem instances shared by property and acceptance tests."""

import numpy as np

from plateau_scope.ansatz import make_checkerboard
from plateau_scope.design import DiffSpec
from plateau_scope.paulis import Hamiltonian, PauliString


def random_instance(rng: np.random.Generator, max_n=10, max_layers=4, max_terms=3):
    """A checkerboard layout, a low-weight Hamiltonian, and an in-cone diff spec."""
    n = int(rng.choice(np.arange(2, max_n + 1, 2)))
    layers = int(rng.integers(1, max_layers + 1))
    topology = str(rng.choice(["line", "ring"]))
    layout = make_checkerboard(n, layers, topology)

    n_terms = int(rng.integers(1, max_terms + 1))
    terms = []
    used = set()
    while len(terms) < n_terms:
        weight = int(rng.integers(1, min(3, n) + 1))
        qubits = rng.choice(n, size=weight, replace=False)
        letters = {int(q): str(rng.choice(list("XYZ"))) for q in qubits}
        string = PauliString.from_map(n, letters)
        if string.letters in used:
            continue
        used.add(string.letters)
        coeff = float(rng.uniform(-2.0, 2.0)) or 1.0
        terms.append((coeff, string))
    hamiltonian = Hamiltonian.from_terms(n, terms)

    block = layout.blocks[int(rng.integers(0, len(layout.blocks)))]
    target = block.qubits[int(rng.integers(0, len(block.qubits)))]
    generator = PauliString.from_map(n, {target: str(rng.choice(list("XYZ")))})
    return layout, hamiltonian, DiffSpec(block.id, generator)
