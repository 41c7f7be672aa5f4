"""Gradient-variance analysis for variational circuits built from local 2-design blocks.

The package splits into five layers:

* :mod:`plateau_scope.paulis` -- sparse Pauli-string algebra and Hamiltonians;
* :mod:`plateau_scope.ansatz` -- block/layer layouts and causal cones;
* :mod:`plateau_scope.design` -- exact gradient variances and the closed-form
  causal-cone lower bound under the local-2-design assumption;
* :mod:`plateau_scope.simulator` -- dense statevector Monte-Carlo oracle with
  parameter-shift gradients;
* :mod:`plateau_scope.tpe` -- proximity of concrete two-qubit gate families to
  exact 2-designs.

The `plateau-scope` command line (:mod:`plateau_scope.cli`) ties these into
reproducible CSV experiments.
"""

from .ansatz import (
    AnsatzLayout,
    Block,
    CausalCone,
    causal_cone,
    cone_contains,
    layout_from_json,
    layout_to_json,
    make_checkerboard,
    validate,
)
from .design import (
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
from .paulis import (
    Hamiltonian,
    PauliString,
    PhasedString,
    commutes,
    parse_hamiltonian,
    pauli_mul,
    support,
)
from .simulator import (
    VarianceEstimate,
    apply_two_qubit,
    build_circuit,
    expectation,
    gradient_sweep,
    haar_unitary,
    mc_variance,
    mc_variance_sweep,
    param_shift_grad,
    zero_state,
)
from .tpe import (
    ConvergenceError,
    MomentMatrix,
    TpeReport,
    haar_moment_exact,
    lambda_norms,
    sampled_moment,
    tpe_benchmark,
)

__all__ = [
    "AnsatzLayout",
    "Block",
    "CausalCone",
    "ConvergenceError",
    "DiffSpec",
    "Hamiltonian",
    "MomentMatrix",
    "PauliString",
    "PhasedString",
    "SupportDistribution",
    "TpeReport",
    "VarianceEstimate",
    "apply_diff_block",
    "apply_mixer",
    "apply_two_qubit",
    "build_circuit",
    "causal_cone",
    "commutes",
    "cone_contains",
    "exact_variance",
    "expectation",
    "gradient_sweep",
    "haar_moment_exact",
    "haar_unitary",
    "lambda_norms",
    "layout_from_json",
    "layout_to_json",
    "lift",
    "make_checkerboard",
    "mc_variance",
    "mc_variance_sweep",
    "measure_zero_state",
    "param_shift_grad",
    "parse_hamiltonian",
    "pauli_mul",
    "sampled_moment",
    "support",
    "theorem_bound",
    "tpe_benchmark",
    "validate",
    "variance_heatmap",
    "zero_state",
]

__version__ = "0.1.0"
