"""Two-qubit gate families and Haar sampling.

Every family is an ordered list of elementary gates on the block's two
qubits; the same list drives the circuit builder (for parameter-shift
gradients), the scalar block builder, and the vectorized batch builder
(for moment estimation).  Rotation convention: R_P(theta) = exp(-i theta P / 2)
under the `half` convention and exp(-i theta P) under `full`; U3 is the
product R_Z(phi) R_Y(theta) R_Z(lambda), i.e. three independent rotations.

Within a block the first listed qubit is the more significant index of the
4x4 matrix, matching the dense Pauli export convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paulis import PauliString

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)

# Generator Pauli letters per rotation kind, in sub-qubit order.
ROTATION_GENERATORS = {
    "RX": "X",
    "RY": "Y",
    "RZ": "Z",
    "RXX": "XX",
    "RYY": "YY",
    "RZZ": "ZZ",
}


@dataclass(frozen=True)
class GateDesc:
    """One elementary gate of a block: kind, sub-qubit wires, parameter count."""

    kind: str
    wires: tuple[int, ...]
    n_params: int


def _u3(wire: int) -> list[GateDesc]:
    # Circuit order of U3 = R_Z(phi) R_Y(theta) R_Z(lambda): lambda rotation first.
    return [
        GateDesc("RZ", (wire,), 1),
        GateDesc("RY", (wire,), 1),
        GateDesc("RZ", (wire,), 1),
    ]


FAMILY_GATES: dict[str, list[GateDesc]] = {
    "xz_zz": [
        GateDesc("RZ", (0,), 1),
        GateDesc("RZ", (1,), 1),
        GateDesc("RZZ", (0, 1), 1),
        GateDesc("RX", (0,), 1),
        GateDesc("RX", (1,), 1),
    ],
    "u3_cnot": _u3(0) + _u3(1) + [GateDesc("CNOT", (0, 1), 0)] + _u3(0) + _u3(1),
    "ry_cz": [
        GateDesc("RY", (0,), 1),
        GateDesc("RY", (1,), 1),
        GateDesc("CZ", (0, 1), 0),
        GateDesc("RY", (0,), 1),
        GateDesc("RY", (1,), 1),
    ],
    "number_conserving": [GateDesc("NC", (0, 1), 2)],
    "cartan": _u3(0)
    + _u3(1)
    + [
        GateDesc("RXX", (0, 1), 1),
        GateDesc("RYY", (0, 1), 1),
        GateDesc("RZZ", (0, 1), 1),
    ]
    + _u3(0)
    + _u3(1),
    "haar4": [GateDesc("HAAR", (0, 1), 0)],
}

FAMILY_NAMES = tuple(FAMILY_GATES)  # registry order, used for seed derivation

PARAM_COUNTS = {
    name: sum(g.n_params for g in gates) for name, gates in FAMILY_GATES.items()
}


def rotation_angle(theta, convention: str):
    """Half-angle of the rotation: theta/2 under `half`, theta under `full`."""
    if convention == "half":
        return theta / 2
    if convention == "full":
        return theta
    raise ValueError(f"unknown derivative convention {convention!r}")


def pauli_rotation(generator: np.ndarray, theta: float, convention: str = "half") -> np.ndarray:
    """exp(-i a P) for an involutory generator P, with a set by the convention."""
    a = rotation_angle(theta, convention)
    dim = generator.shape[0]
    return np.cos(a) * np.eye(dim, dtype=complex) - 1j * np.sin(a) * generator


def generator_matrix(kind: str) -> np.ndarray:
    """Dense generator of a rotation kind on its own wires (2x2 or 4x4)."""
    letters = ROTATION_GENERATORS[kind]
    m = PAULI_1Q[letters[0]]
    for ch in letters[1:]:
        m = np.kron(m, PAULI_1Q[ch])
    return m


def number_conserving_matrix(theta1, theta2) -> np.ndarray:
    c, s = np.cos(theta1), np.sin(theta1)
    ph = np.exp(1j * theta2)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, c, ph * s, 0],
            [0, np.conj(ph) * s, -c, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    )


def gate_matrix(desc: GateDesc, params, convention: str = "half") -> np.ndarray:
    """Dense matrix of one elementary gate on its own wires."""
    if desc.kind == "CNOT":
        return CNOT
    if desc.kind == "CZ":
        return CZ
    if desc.kind == "NC":
        return number_conserving_matrix(params[0], params[1])
    if desc.kind in ROTATION_GENERATORS:
        return pauli_rotation(generator_matrix(desc.kind), params[0], convention)
    raise ValueError(f"gate kind {desc.kind!r} has no fixed matrix")


def _expand_to_block(desc: GateDesc, mat: np.ndarray) -> np.ndarray:
    """Lift a single-wire gate to the full 4x4 block matrix."""
    if len(desc.wires) == 2:
        return mat
    if desc.wires == (0,):
        return np.kron(mat, np.eye(2, dtype=complex))
    return np.kron(np.eye(2, dtype=complex), mat)


def block_unitary(family: str, params, convention: str = "half") -> np.ndarray:
    """4x4 unitary of one block for a flat per-block parameter vector."""
    gates = FAMILY_GATES[family]
    if family == "haar4":
        raise ValueError("haar4 blocks are sampled, not parametrized")
    expected = PARAM_COUNTS[family]
    if len(params) != expected:
        raise ValueError(f"{family} expects {expected} parameters, got {len(params)}")
    u = np.eye(4, dtype=complex)
    pos = 0
    for desc in gates:
        mat = gate_matrix(desc, params[pos : pos + desc.n_params], convention)
        u = _expand_to_block(desc, mat) @ u
        pos += desc.n_params
    return u


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed unitary (QR of a Ginibre matrix, phases fixed)."""
    return haar_batch(dim, 1, rng)[0]


def haar_batch(dim: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    z = rng.standard_normal((size, dim, dim)) + 1j * rng.standard_normal(
        (size, dim, dim)
    )
    q, r = np.linalg.qr(z)
    diag = np.einsum("sii->si", r)
    q *= (diag / np.abs(diag))[:, None, :]
    return q


def _rotation_batch(kind: str, thetas: np.ndarray) -> np.ndarray:
    gen = generator_matrix(kind)
    a = thetas / 2  # sampling always uses the half convention gate set
    dim = gen.shape[0]
    eye = np.eye(dim, dtype=complex)
    return (
        np.cos(a)[:, None, None] * eye - 1j * np.sin(a)[:, None, None] * gen
    )


def _kron_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = a.shape[0]
    da, db = a.shape[1], b.shape[1]
    return np.einsum("sij,skl->sikjl", a, b).reshape(s, da * db, da * db)


def sample_blocks(family: str, size: int, rng: np.random.Generator) -> np.ndarray:
    """`size` independent block unitaries with angles uniform in [0, 2*pi)."""
    if family == "haar4":
        return haar_batch(4, size, rng)
    gates = FAMILY_GATES[family]
    params = rng.uniform(0.0, 2.0 * np.pi, size=(size, PARAM_COUNTS[family]))
    u = np.broadcast_to(np.eye(4, dtype=complex), (size, 4, 4)).copy()
    eye2 = np.broadcast_to(np.eye(2, dtype=complex), (size, 2, 2))
    pos = 0
    for desc in gates:
        if desc.kind in ("CNOT", "CZ"):
            mat = np.broadcast_to(gate_matrix(desc, ()), (size, 4, 4))
        elif desc.kind == "NC":
            t1, t2 = params[:, pos], params[:, pos + 1]
            mat = np.zeros((size, 4, 4), dtype=complex)
            mat[:, 0, 0] = 1
            mat[:, 3, 3] = 1
            mat[:, 1, 1] = np.cos(t1)
            mat[:, 2, 2] = -np.cos(t1)
            mat[:, 1, 2] = np.exp(1j * t2) * np.sin(t1)
            mat[:, 2, 1] = np.exp(-1j * t2) * np.sin(t1)
        else:
            rot = _rotation_batch(desc.kind, params[:, pos])
            if len(desc.wires) == 1:
                mat = (
                    _kron_batch(rot, eye2)
                    if desc.wires == (0,)
                    else _kron_batch(eye2, rot)
                )
            else:
                mat = rot
        u = mat @ u
        pos += desc.n_params
    return u


def shift_generator(family: str, slot: int) -> PauliString:
    """Pauli generator (on a 2-qubit register) behind a parameter slot.

    Raises for slots whose gate is not an elementary Pauli rotation
    (the number-conserving block).
    """
    gates = FAMILY_GATES[family]
    pos = 0
    for desc in gates:
        if pos <= slot < pos + desc.n_params:
            if desc.kind not in ROTATION_GENERATORS:
                raise ValueError(
                    f"slot {slot} of {family} is not a Pauli rotation; "
                    "the parameter-shift rule does not apply"
                )
            letters = ROTATION_GENERATORS[desc.kind]
            mapping = {w: ch for w, ch in zip(desc.wires, letters)}
            return PauliString.from_map(2, mapping)
        pos += desc.n_params
    raise ValueError(f"slot {slot} out of range for family {family}")
