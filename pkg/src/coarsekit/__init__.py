"""Finite-scale tools for uniformly locally finite coarse geometry."""

from .actions import (
    ActionGenerators,
    BoxSpace,
    PartialTranslation,
    box_space,
    edge_color_decompose,
    is_involution,
    realize_as_action,
    schreier_graph,
    two_by_two,
    two_by_two_matrix,
)
from .coarse import (
    INF,
    Entourage,
    ExtendedMetric,
    Filtration,
    UlfGraph,
    check_ulf,
    compose_entourages,
    filtration_from_generators,
    graph_metric,
    inverse_entourage,
    metric_from_filtration,
)
from .propa import (
    ProbMeasure,
    SmoothingReport,
    Witness,
    ball_average_witness,
    smooth,
    smoothing_constant,
    smoothing_sum,
    verify_smoothing,
    witness_quality,
)
from .repcheck import (
    CheckReport,
    compression_state_identity,
    diag_embed,
    ghost_vanishing,
    hs_inner,
    hs_norm,
    left_right_apply,
    lemma_inequalities,
    norm_reduction,
    translate,
)
from .roe import (
    BallCompression,
    PropOperator,
    SparseFamily,
    TopEigenvector,
    block_constant_ghost,
    block_constant_projection,
    compress,
    ghost_profile,
    h_gamma,
    is_ghost_like,
    nonneg_top_eigenvector,
    operator_norm,
    propagation,
    sparse_diagonal,
)

__version__ = "0.1.0"
