"""Bernstein-type approximation around an interior singularity.

A modified degree-n operator that blends the target function into a chord
across a shrinking zone around the singular point, together with the
weighted sup-norms and second-order moduli of smoothness needed to verify
its stability, second-derivative bounds, and direct/inverse convergence
rates numerically.
"""

from .basis import (
    basis_eval,
    basis_matrix,
    basis_row,
    central_moment_sum,
    inverse_moment_sum,
    ksum,
)
from .bridge import (
    BridgeNodes,
    InvalidNodesError,
    LinearJoiner,
    compute_nodes,
    linear_joiner,
    min_valid_n,
    psi,
    psi_bar,
    psi_derivatives,
    surrogate_eval,
)
from .moduli import (
    ModulusQuery,
    h_ladder,
    kfunctional_upper,
    omega2,
    omega2_mainpart,
    second_difference_backward,
    second_difference_forward,
    second_difference_symmetric,
)
from .operators import (
    SurrogateCoefficients,
    bbar_apply,
    bbar_second_derivative,
    bernstein_apply,
    build_surrogate,
    weighted_operator_norm_ratio,
)
from .weight import (
    EvaluationError,
    GridSpec,
    SingularWeight,
    TestFunction,
    corpus,
    corpus_member,
    delta_n,
    grid_points,
    phi,
    weight_eval,
    weighted_sup_norm,
    weighted_values,
)

__version__ = "0.1.0"

__all__ = [
    "BridgeNodes", "EvaluationError", "GridSpec", "InvalidNodesError",
    "LinearJoiner", "ModulusQuery", "SingularWeight", "SurrogateCoefficients",
    "TestFunction", "basis_eval", "basis_matrix", "basis_row", "bbar_apply",
    "bbar_second_derivative", "bernstein_apply", "build_surrogate",
    "central_moment_sum", "compute_nodes", "corpus", "corpus_member",
    "delta_n", "grid_points", "h_ladder", "inverse_moment_sum",
    "kfunctional_upper", "ksum", "linear_joiner", "min_valid_n", "omega2",
    "omega2_mainpart", "phi", "psi", "psi_bar", "psi_derivatives",
    "second_difference_backward", "second_difference_forward",
    "second_difference_symmetric", "surrogate_eval", "weight_eval",
    "weighted_operator_norm_ratio", "weighted_sup_norm", "weighted_values",
]
