"""Dense statevector Monte-Carlo oracle for gradient variances.

Qubit 0 is the most significant amplitude index, matching the dense Pauli
export.  Circuits are lists of elementary gates produced from a layout and
a gate family; derivatives come from the parameter-shift rule, either as
the literal pair of shifted evaluations (`param_shift_grad`) or, for
whole-gradient sweeps, through an adjoint-style double sweep that yields
the same analytic derivative in two passes per sample.

Two derivative conventions coexist and are always explicit: `half` treats
a parametrized gate as exp(-i theta P / 2) with derivative
(E(theta + pi/2) - E(theta - pi/2)) / 2, while `full` treats it as
exp(-i theta F) with derivative E(theta + pi/4) - E(theta - pi/4).
Variances differ by a factor of 4 between the two.  The haar4 oracle pins
`full` (each block G_A exp(-i theta F) G_B with Haar G_A, G_B); the
parametric figure-reproduction paths pin `half`.

Sampling is deterministic for a fixed master seed regardless of the worker
count: sample i draws from its own stream seeded by (master_seed, i), and
aggregation runs over the sample-ordered array.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import gates as gatelib
from .ansatz import AnsatzLayout, validate
from .design import DiffSpec
from .gates import FAMILY_GATES, PARAM_COUNTS, GateDesc
from .paulis import Hamiltonian, PauliString

MAX_QUBITS = 14
UNITARY_ATOL = 1e-10


def zero_state(n_qubits: int) -> np.ndarray:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n_qubits}")
    state = np.zeros(2**n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def _apply_1q(state: np.ndarray, mat: np.ndarray, qubit: int, n: int) -> np.ndarray:
    t = state.reshape([2] * n)
    t = np.moveaxis(t, qubit, 0).reshape(2, -1)
    t = mat @ t
    return np.moveaxis(t.reshape([2] * n), 0, qubit).reshape(-1)


def _apply_2q(
    state: np.ndarray, mat: np.ndarray, pair: tuple[int, int], n: int
) -> np.ndarray:
    a, b = pair
    t = state.reshape([2] * n)
    t = np.moveaxis(t, (a, b), (0, 1)).reshape(4, -1)
    t = mat @ t
    return np.moveaxis(t.reshape([2] * n), (0, 1), (a, b)).reshape(-1)


def apply_two_qubit(
    state: np.ndarray, unitary: np.ndarray, pair: tuple[int, int], n_qubits: int
) -> np.ndarray:
    """Apply a 4x4 unitary to a qubit pair (first index more significant)."""
    a, b = pair
    if a == b or not (0 <= a < n_qubits and 0 <= b < n_qubits):
        raise ValueError(f"bad qubit pair {pair} for {n_qubits} qubits")
    if unitary.shape != (4, 4) or not np.allclose(
        unitary.conj().T @ unitary, np.eye(4), atol=UNITARY_ATOL
    ):
        raise ValueError("gate is not unitary to 1e-10")
    out = _apply_2q(state, unitary, (a, b), n_qubits)
    if abs(np.linalg.norm(out) - 1.0) > 1e-10:
        raise ValueError("state norm drifted beyond 1e-10")
    return out


def apply_pauli(state: np.ndarray, h: PauliString) -> np.ndarray:
    out = state
    for q, letter in h.letters:
        out = _apply_1q(out, gatelib.PAULI_1Q[letter], q, h.n_qubits)
    return out


def _apply_hamiltonian(state: np.ndarray, H: Hamiltonian) -> np.ndarray:
    out = np.zeros_like(state)
    for coeff, h in H.terms:
        out += coeff * apply_pauli(state, h)
    return out


def expectation(state: np.ndarray, H: Hamiltonian) -> float:
    """<psi| H |psi>; raises if the imaginary residue exceeds 1e-10."""
    if state.shape != (2**H.n_qubits,):
        raise ValueError("state dimension does not match Hamiltonian")
    value = complex(np.vdot(state, _apply_hamiltonian(state, H)))
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residue {value.imag}")
    return value.real


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary; the contract is distributional (moment tests)."""
    return gatelib.haar_unitary(dim, rng)


@dataclass(frozen=True)
class CircuitGate:
    """An elementary gate placed on register qubits, with global param slots."""

    block_id: int
    layer: int
    qubits: tuple[int, ...]
    kind: str
    param_indices: tuple[int, ...]


def build_circuit(layout: AnsatzLayout, family: str) -> list[CircuitGate]:
    """Elementary gates in application order, parameters indexed flat.

    Parameter index p of block k, slot s satisfies p = offset(k) + s with
    slots numbered in circuit order inside the block.
    """
    if family not in FAMILY_GATES:
        raise ValueError(f"unknown gate family {family!r}")
    problems = validate(layout)
    if problems:
        raise ValueError("invalid layout: " + "; ".join(problems))
    out: list[CircuitGate] = []
    next_param = 0
    for block in layout.application_order():
        if len(block.qubits) != 2:
            raise ValueError(
                f"two-qubit gate family on block {block.id} with "
                f"{len(block.qubits)} qubits"
            )
        for desc in FAMILY_GATES[family]:
            qubits = tuple(block.qubits[w] for w in desc.wires)
            indices = tuple(range(next_param, next_param + desc.n_params))
            out.append(CircuitGate(block.id, block.layer, qubits, desc.kind, indices))
            next_param += desc.n_params
    return out


def circuit_param_count(layout: AnsatzLayout, family: str) -> int:
    return PARAM_COUNTS[family] * len(layout.blocks)


def param_table(layout: AnsatzLayout, family: str) -> list[tuple[int, int, int, int]]:
    """Rows (param_index, block_id, layer, slot) for per-parameter outputs."""
    rows = []
    for gate in build_circuit(layout, family):
        for idx in gate.param_indices:
            slot = idx - PARAM_COUNTS[family] * _block_position(layout, gate.block_id)
            rows.append((idx, gate.block_id, gate.layer, slot))
    return rows


def _block_position(layout: AnsatzLayout, block_id: int) -> int:
    for pos, block in enumerate(layout.application_order()):
        if block.id == block_id:
            return pos
    raise KeyError(block_id)


def _gate_matrix(gate: CircuitGate, params: Sequence[float], convention: str) -> np.ndarray:
    desc = GateDesc(gate.kind, tuple(range(len(gate.qubits))), len(gate.param_indices))
    return gatelib.gate_matrix(
        desc, [params[i] for i in gate.param_indices], convention
    )


def run_circuit(
    gates: Sequence[CircuitGate],
    params: Sequence[float],
    n_qubits: int,
    convention: str = "half",
) -> np.ndarray:
    state = zero_state(n_qubits)
    for gate in gates:
        mat = _gate_matrix(gate, params, convention)
        if len(gate.qubits) == 1:
            state = _apply_1q(state, mat, gate.qubits[0], n_qubits)
        else:
            state = _apply_2q(state, mat, gate.qubits, n_qubits)
    return state


def _energy(
    gates: Sequence[CircuitGate],
    params: Sequence[float],
    H: Hamiltonian,
    convention: str,
) -> float:
    return expectation(run_circuit(gates, params, H.n_qubits, convention), H)


def param_shift_grad(
    layout: AnsatzLayout,
    family: str,
    params: Sequence[float],
    H: Hamiltonian,
    param_index: int,
    convention: str = "half",
) -> float:
    """Exact derivative from two shifted evaluations of the cost function."""
    gates = build_circuit(layout, family)
    return _shift_rule(gates, params, H, param_index, convention)


def _owning_gate(gates: Sequence[CircuitGate], param_index: int) -> CircuitGate:
    for gate in gates:
        if param_index in gate.param_indices:
            return gate
    raise ValueError(f"parameter index {param_index} out of range")


def _shift_rule(
    gates: Sequence[CircuitGate],
    params: Sequence[float],
    H: Hamiltonian,
    param_index: int,
    convention: str,
) -> float:
    gate = _owning_gate(gates, param_index)
    if gate.kind not in gatelib.ROTATION_GENERATORS:
        raise ValueError(
            f"parameter {param_index} drives a {gate.kind} gate, which is not "
            "an elementary Pauli rotation; the shift rule does not apply"
        )
    if convention == "half":
        shift, scale = math.pi / 2, 0.5
    elif convention == "full":
        shift, scale = math.pi / 4, 1.0
    else:
        raise ValueError(f"unknown derivative convention {convention!r}")
    plus = list(params)
    minus = list(params)
    plus[param_index] += shift
    minus[param_index] -= shift
    return scale * (_energy(gates, plus, H, convention) - _energy(gates, minus, H, convention))


def gradient_sweep(
    gates: Sequence[CircuitGate],
    params: Sequence[float],
    H: Hamiltonian,
    convention: str = "half",
) -> np.ndarray:
    """All parameter derivatives in one forward and one backward pass.

    Analytically identical to the parameter-shift values (the shift rule
    is exact for Pauli rotations); used where sweeping every parameter
    with shifted evaluations would be quadratic in circuit size.
    """
    n = H.n_qubits
    n_params = sum(len(g.param_indices) for g in gates)
    mats = [_gate_matrix(g, params, convention) for g in gates]
    psi = zero_state(n)
    for gate, mat in zip(gates, mats):
        if len(gate.qubits) == 1:
            psi = _apply_1q(psi, mat, gate.qubits[0], n)
        else:
            psi = _apply_2q(psi, mat, gate.qubits, n)
    lam = _apply_hamiltonian(psi, H)
    w = psi
    derivs = np.zeros(n_params)
    scale = 1.0 if convention == "half" else 2.0
    for gate, mat in zip(reversed(gates), reversed(mats)):
        if gate.param_indices and gate.kind in gatelib.ROTATION_GENERATORS:
            gen = gatelib.generator_matrix(gate.kind)
            if len(gate.qubits) == 1:
                pw = _apply_1q(w, gen, gate.qubits[0], n)
            else:
                pw = _apply_2q(w, gen, gate.qubits, n)
            derivs[gate.param_indices[0]] = scale * np.vdot(lam, pw).imag
        dag = mat.conj().T
        if len(gate.qubits) == 1:
            w = _apply_1q(w, dag, gate.qubits[0], n)
            lam = _apply_1q(lam, dag, gate.qubits[0], n)
        else:
            w = _apply_2q(w, dag, gate.qubits, n)
            lam = _apply_2q(lam, dag, gate.qubits, n)
    return derivs


@dataclass(frozen=True)
class VarianceEstimate:
    """Monte-Carlo gradient-variance estimate with its own standard error."""

    mean: float
    variance: float
    std_error: float
    sample_count: int
    seed: int | tuple[int, ...]


def _estimate(derivs: np.ndarray, seed) -> VarianceEstimate:
    squares = derivs * derivs
    return VarianceEstimate(
        mean=float(np.mean(derivs)),
        variance=float(np.var(derivs)),
        std_error=float(np.std(squares, ddof=1) / math.sqrt(len(derivs))),
        sample_count=len(derivs),
        seed=seed,
    )


def _sample_rng(master_seed, index: int) -> np.random.Generator:
    seed = master_seed if isinstance(master_seed, tuple) else (master_seed,)
    return np.random.default_rng((*seed, index))


def _collect(
    fn: Callable[[int], float | np.ndarray],
    samples: int,
    workers: int,
) -> list:
    out: list = [None] * samples
    if workers <= 1:
        for i in range(samples):
            out[i] = fn(i)
        return out
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i, value in zip(range(samples), pool.map(fn, range(samples))):
            out[i] = value
    return out


def _expand_generator(generator: PauliString, pair: tuple[int, int]) -> np.ndarray:
    """4x4 matrix of a generator supported on a block's qubit pair."""
    letters = dict(generator.letters)
    m = gatelib.PAULI_1Q[letters.get(pair[0], "I")]
    return np.kron(m, gatelib.PAULI_1Q[letters.get(pair[1], "I")])


def oracle_derivative_samples(
    layout: AnsatzLayout,
    H: Hamiltonian,
    diff: DiffSpec,
    samples: int,
    master_seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Per-sample derivatives with every block an independent Haar unitary.

    The differentiated block is G_A exp(-i theta F) G_B with Haar G_A, G_B
    and theta uniform; the derivative is E(theta + pi/4) - E(theta - pi/4)
    (`full` convention).
    """
    problems = validate(layout)
    if problems:
        raise ValueError("invalid layout: " + "; ".join(problems))
    diff.check(layout)
    order = layout.application_order()
    if any(len(b.qubits) != 2 for b in order):
        raise ValueError("haar4 oracle requires two-qubit blocks")
    pair = layout.block(diff.block_id).qubits
    gen = _expand_generator(diff.generator, pair)
    n = layout.n_qubits

    def one(i: int) -> float:
        rng = _sample_rng(master_seed, i)
        # one batched QR per sample: every block draws one unitary, the
        # differentiated block a second one for its G_A half
        draws = gatelib.haar_batch(4, len(order) + 1, rng)
        theta = rng.uniform(0.0, 2.0 * math.pi)

        def energy(shift: float) -> float:
            state = zero_state(n)
            cursor = 0
            for block in order:
                if block.id == diff.block_id:
                    state = _apply_2q(state, draws[cursor], block.qubits, n)
                    rot = gatelib.pauli_rotation(gen, theta + shift, "full")
                    state = _apply_2q(state, rot, block.qubits, n)
                    state = _apply_2q(state, draws[cursor + 1], block.qubits, n)
                    cursor += 2
                else:
                    state = _apply_2q(state, draws[cursor], block.qubits, n)
                    cursor += 1
            return expectation(state, H)

        return energy(math.pi / 4) - energy(-math.pi / 4)

    return np.array(_collect(one, samples, workers))


def parametric_derivative_samples(
    layout: AnsatzLayout,
    family: str,
    H: Hamiltonian,
    param_index: int,
    samples: int,
    master_seed: int,
    convention: str = "half",
    workers: int = 1,
) -> np.ndarray:
    """Per-sample shift-rule derivatives at one parameter, angles uniform."""
    gates = build_circuit(layout, family)
    n_params = circuit_param_count(layout, family)
    gate = _owning_gate(gates, param_index)
    if gate.kind not in gatelib.ROTATION_GENERATORS:
        raise ValueError(f"parameter {param_index} is not a Pauli-rotation slot")

    def one(i: int) -> float:
        rng = _sample_rng(master_seed, i)
        params = rng.uniform(0.0, 2.0 * math.pi, n_params)
        return _shift_rule(gates, params, H, param_index, convention)

    return np.array(_collect(one, samples, workers))


def sweep_derivative_samples(
    layout: AnsatzLayout,
    family: str,
    H: Hamiltonian,
    samples: int,
    master_seed: int,
    convention: str = "half",
    workers: int = 1,
) -> np.ndarray:
    """(samples, n_params) derivatives, one adjoint double sweep per sample."""
    gates = build_circuit(layout, family)
    n_params = circuit_param_count(layout, family)
    if n_params == 0 or any(
        g.param_indices and g.kind not in gatelib.ROTATION_GENERATORS for g in gates
    ):
        raise ValueError(
            f"family {family!r} has parameter slots without Pauli-rotation "
            "generators; per-parameter variances are undefined"
        )

    def one(i: int) -> np.ndarray:
        rng = _sample_rng(master_seed, i)
        params = rng.uniform(0.0, 2.0 * math.pi, n_params)
        return gradient_sweep(gates, params, H, convention)

    return np.array(_collect(one, samples, workers))


def mc_variance(
    layout: AnsatzLayout,
    family: str,
    H: Hamiltonian,
    diff: DiffSpec | int,
    samples: int,
    master_seed: int,
    convention: str | None = None,
    workers: int = 1,
) -> VarianceEstimate:
    """Monte-Carlo estimate of the gradient variance for one derivative target.

    With family `haar4` the target is a DiffSpec and the convention is
    `full`; with a parametric family the target is a flat parameter index
    and the default convention is `half`.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if family == "haar4":
        if not isinstance(diff, DiffSpec):
            raise ValueError("haar4 oracle needs a DiffSpec target")
        if convention not in (None, "full"):
            raise ValueError("the haar4 oracle is defined in the `full` convention")
        derivs = oracle_derivative_samples(
            layout, H, diff, samples, master_seed, workers
        )
    else:
        if not isinstance(diff, int):
            raise ValueError("parametric families take a flat parameter index")
        derivs = parametric_derivative_samples(
            layout, family, H, diff, samples, master_seed, convention or "half", workers
        )
    return _estimate(derivs, master_seed)


def mc_variance_sweep(
    layout: AnsatzLayout,
    family: str,
    H: Hamiltonian,
    samples: int,
    master_seed: int,
    convention: str = "half",
    workers: int = 1,
) -> list[VarianceEstimate]:
    """Per-parameter variance estimates sharing one set of sampled circuits."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    derivs = sweep_derivative_samples(
        layout, family, H, samples, master_seed, convention, workers
    )
    return [_estimate(derivs[:, k], master_seed) for k in range(derivs.shape[1])]
