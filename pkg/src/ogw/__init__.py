"""Orthogonal Gromov-Wasserstein discrepancies between graphs.

Closed-form lower bounds and locally optimized upper bounds on the
orthogonally-relaxed Gromov-Wasserstein discrepancy, the fused variant
with node features, vanilla-GW baselines, and barycenters with spectral
reconstruction.
"""

from .barycenter import (
    BarycenterResult,
    BarycenterSpec,
    CoordinateRecovery,
    lift_to_full,
    recover_coordinates_2d,
    solve_barycenter,
    spectral_reconstruct,
    threshold_adjacency,
)
from .graphio import (
    CostMatrix,
    DatasetError,
    FeatureDistance,
    Graph,
    GraphParseError,
    adjacency_complement_cost,
    degree_features,
    feature_distance,
    load_points_csv,
    parse_edge_list,
    parse_tu_dataset,
    read_edge_list,
    shortest_path_cost,
)
from .gwbaseline import (
    TransportPlan,
    UnsupportedOrderError,
    brute_force_perm,
    gw_flb,
    gw_fw,
    gw_tlb,
    hungarian,
    ot1d_squared,
)
from .ofgw import FusedProblem, build_fused, check_theorem3_condition, ofgw_lb, ofgw_ub
from .ogw import (
    Coupling,
    PqnOptions,
    ReducedProblem,
    build_reduced,
    ogw_lb,
    ogw_o,
    ogw_ub,
    recover_coupling,
)
from .result import DiscrepancyResult
from .spectral import (
    ProjectionBasis,
    SpectralEmbedding,
    grand_sum,
    hat,
    make_projection_basis,
    nuclear_norm,
    project_to_stiefel,
    spectral_embedding,
    sym_eig_desc,
)

__all__ = [
    "BarycenterResult",
    "BarycenterSpec",
    "CoordinateRecovery",
    "CostMatrix",
    "Coupling",
    "DatasetError",
    "DiscrepancyResult",
    "FeatureDistance",
    "FusedProblem",
    "Graph",
    "GraphParseError",
    "PqnOptions",
    "ProjectionBasis",
    "ReducedProblem",
    "SpectralEmbedding",
    "TransportPlan",
    "UnsupportedOrderError",
    "adjacency_complement_cost",
    "brute_force_perm",
    "build_fused",
    "build_reduced",
    "check_theorem3_condition",
    "degree_features",
    "feature_distance",
    "grand_sum",
    "gw_flb",
    "gw_fw",
    "gw_tlb",
    "hat",
    "hungarian",
    "lift_to_full",
    "load_points_csv",
    "make_projection_basis",
    "nuclear_norm",
    "ogw_lb",
    "ogw_o",
    "ogw_ub",
    "ot1d_squared",
    "parse_edge_list",
    "parse_tu_dataset",
    "project_to_stiefel",
    "read_edge_list",
    "recover_coordinates_2d",
    "recover_coupling",
    "shortest_path_cost",
    "solve_barycenter",
    "spectral_embedding",
    "spectral_reconstruct",
    "sym_eig_desc",
    "threshold_adjacency",
]

__version__ = "0.1.0"
