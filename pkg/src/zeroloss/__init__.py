"""Explicit construction and verification of ReLU networks with zero training loss."""

from .construct import (
    ClusteredOptions,
    ConstructionTrace,
    SLSOptions,
    build_clustered,
    build_sls,
    build_truncation_layer,
    collapsed_schedule,
    solve_last_layer,
)
from .dataset import (
    LabeledDataset,
    SearchOptions,
    SLSCertificate,
    check_clustered,
    class_stats,
    find_sls_certificate,
    gen_clustered,
    gen_sls,
    to_barycentric,
)
from .geom import Cone, ball_in_cone, cone_contains, lambda_shrink, min_enclosing_aperture, theta_n, w_theta
from .netcore import (
    CumulativeNet,
    LayerNet,
    cumulative_from_layers,
    forward,
    layers_from_cumulative,
    projector_chain,
    tau_chain,
    truncate,
)
from .numlin import Tolerance, invertible_block_permutation, pinv, rank, rotation_to
from .verify import certify, cost, cost_decomposed, cost_normalized, count_params, degeneracy_probe

__version__ = "0.1.0"

__all__ = [
    "ClusteredOptions",
    "ConstructionTrace",
    "SLSOptions",
    "build_clustered",
    "build_sls",
    "build_truncation_layer",
    "collapsed_schedule",
    "solve_last_layer",
    "LabeledDataset",
    "SearchOptions",
    "SLSCertificate",
    "check_clustered",
    "class_stats",
    "find_sls_certificate",
    "gen_clustered",
    "gen_sls",
    "to_barycentric",
    "Cone",
    "ball_in_cone",
    "cone_contains",
    "lambda_shrink",
    "min_enclosing_aperture",
    "theta_n",
    "w_theta",
    "CumulativeNet",
    "LayerNet",
    "cumulative_from_layers",
    "forward",
    "layers_from_cumulative",
    "projector_chain",
    "tau_chain",
    "truncate",
    "Tolerance",
    "invertible_block_permutation",
    "pinv",
    "rank",
    "rotation_to",
    "certify",
    "cost",
    "cost_decomposed",
    "cost_normalized",
    "count_params",
    "degeneracy_probe",
]
