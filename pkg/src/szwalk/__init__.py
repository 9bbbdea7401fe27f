"""Quantum walk hitting times on percolated graphs.

Builds bipartite-reflection walk operators from row-stochastic matrices,
computes coherent and noise-averaged quantum hitting times with their
closed-form spectral bounds, and runs marked-set detection campaigns under
two edge-noise models.  Hot kernels run through a compiled extension when
available, with a pure NumPy fallback selected at import
(set SZWALK_PURE_PYTHON=1 to force the fallback).
"""

from .detection import (
    DetectionReport,
    DetectionTrialResult,
    exact_mean_p1,
    invariance_deviation_over_subgraphs,
    run_detection_campaign,
    run_detection_trial,
)
from .graphs import (
    Graph,
    GraphValidationError,
    MarkedSet,
    TransitionMatrix,
    apply_marking,
    build_transition_matrix,
    complete_graph,
    generate_graph,
    load_graph,
    odd_cycle,
    submatrix_PM,
    validate_base_graph,
)
from .hitting import (
    GTermReport,
    HittingTimeReport,
    classical_hitting_time,
    coherent_F_curve,
    coherent_qht,
    decoherent_F_curve,
    decoherent_qht,
    g_term_decomposition,
)
from .kernels import BACKEND
from .percolation import (
    EXACT_ENUMERATION_CAP,
    AveragedOperator,
    EnumerationCapError,
    PercolationModel,
    averaged_operator,
    build_averaged_operator_exact,
    build_averaged_operator_mc,
    occurrence_probability,
    sample_percolated_graph,
    verify_lemma1,
)
from .rng import philox_stream
from .serialize import (
    SCHEMA_VERSION,
    json_dumps,
    stamped,
    write_csv,
    write_json,
)
from .spectral import (
    BoundInfiniteError,
    BoundReport,
    SpectralData,
    block_structure_deviation,
    bound_report,
    build_C,
    corollary_scaling,
    detection_bound,
    dqht_bound,
    E_quantity,
    p_threshold,
    spectral_data,
    split_initial_state,
    szegedy_bound,
)
from .walk import (
    WalkOperator,
    WalkState,
    apply_walk_from_sqrt,
    build_walk_operator,
    evolve,
    initial_state,
    marked_sqrt_transition,
    phi_state,
    position_distribution,
    psi_state,
    sqrt_transition,
)

__version__ = "0.1.0"

__all__ = [
    "AveragedOperator",
    "BACKEND",
    "BoundInfiniteError",
    "BoundReport",
    "DetectionReport",
    "DetectionTrialResult",
    "EXACT_ENUMERATION_CAP",
    "EnumerationCapError",
    "E_quantity",
    "GTermReport",
    "Graph",
    "GraphValidationError",
    "HittingTimeReport",
    "MarkedSet",
    "PercolationModel",
    "SpectralData",
    "TransitionMatrix",
    "WalkOperator",
    "WalkState",
    "apply_marking",
    "apply_walk_from_sqrt",
    "averaged_operator",
    "block_structure_deviation",
    "bound_report",
    "build_C",
    "build_averaged_operator_exact",
    "build_averaged_operator_mc",
    "build_transition_matrix",
    "build_walk_operator",
    "classical_hitting_time",
    "coherent_F_curve",
    "coherent_qht",
    "complete_graph",
    "corollary_scaling",
    "decoherent_F_curve",
    "decoherent_qht",
    "detection_bound",
    "dqht_bound",
    "evolve",
    "exact_mean_p1",
    "g_term_decomposition",
    "generate_graph",
    "initial_state",
    "invariance_deviation_over_subgraphs",
    "json_dumps",
    "load_graph",
    "marked_sqrt_transition",
    "occurrence_probability",
    "odd_cycle",
    "p_threshold",
    "philox_stream",
    "phi_state",
    "position_distribution",
    "psi_state",
    "run_detection_campaign",
    "run_detection_trial",
    "sample_percolated_graph",
    "SCHEMA_VERSION",
    "spectral_data",
    "split_initial_state",
    "sqrt_transition",
    "stamped",
    "submatrix_PM",
    "szegedy_bound",
    "validate_base_graph",
    "verify_lemma1",
    "write_csv",
    "write_json",
]
