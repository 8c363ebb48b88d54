"""Spectral analysis of metric graphs: eigenvalues via the secular
equation, nodal counts, the torus parameterization of equipartitions, and
Morse-index verification of the nodal deficiency."""

from .errors import (
    BracketFailure,
    ConsistencyError,
    DegenerateEigenvalue,
    DirichletGlue,
    Disconnects,
    IdenticallyZeroEdge,
    ImproperEigenfunction,
    ImproperPartition,
    InvalidGraph,
    LeftDomain,
    LeftNeighborhood,
    NoConvergence,
    NotEquipartition,
    OutsideDomain,
    ParseError,
    QGraphError,
    SectionOnZero,
    UnsupportedBeta,
)
from .graph import (
    CutResult,
    Edge,
    EdgePoint,
    MetricGraph,
    Partition,
    RobinPair,
    SplitGraph,
    VertexCondition,
    betti,
    build_robin_tree,
    choose_sections,
    component_map,
    components,
    cut,
    glue,
    is_bipartite,
    is_connected,
    local_sections,
    make_partition,
    wrap_angle,
)
from .io import format_graph, load_graph, parse_graph
from .morse import (
    DeficiencyHistogram,
    HessianEstimate,
    MorseReport,
    deficiency_histogram,
    find_critical,
    grad_lambda,
    hessian,
    mixed_minimax_check,
    morse_index,
    reconstruct_eigenvalue,
    verify_theorem,
)
from .partition import (
    EquipartitionRecord,
    TorusPoint,
    as_torus_point,
    component_energies,
    is_equipartition,
    lambda_of_partition,
    lambda_phi,
    local_angles,
    minimal_m,
    phi_inverse,
    phi_map,
    phi_map_local,
)
from .spectral import (
    EigenPair,
    SecularSystem,
    SpectrumQuery,
    WeylAudit,
    basis_sc,
    eigenfunction,
    eigenvalues,
    ground_energy,
    is_proper,
    nodal_counts,
    rayleigh_quotient,
    secular_value,
    sup_norm,
    vertex_values,
    weyl_audit,
    zeros,
)

__version__ = "0.1.0"

__all__ = [
    "BracketFailure",
    "ConsistencyError",
    "CutResult",
    "DeficiencyHistogram",
    "DegenerateEigenvalue",
    "DirichletGlue",
    "Disconnects",
    "Edge",
    "EdgePoint",
    "EigenPair",
    "EquipartitionRecord",
    "HessianEstimate",
    "IdenticallyZeroEdge",
    "ImproperEigenfunction",
    "ImproperPartition",
    "InvalidGraph",
    "LeftDomain",
    "LeftNeighborhood",
    "MetricGraph",
    "MorseReport",
    "NoConvergence",
    "NotEquipartition",
    "OutsideDomain",
    "ParseError",
    "Partition",
    "QGraphError",
    "RobinPair",
    "SectionOnZero",
    "SecularSystem",
    "SplitGraph",
    "SpectrumQuery",
    "TorusPoint",
    "UnsupportedBeta",
    "VertexCondition",
    "WeylAudit",
    "as_torus_point",
    "basis_sc",
    "betti",
    "build_robin_tree",
    "choose_sections",
    "component_energies",
    "component_map",
    "components",
    "cut",
    "deficiency_histogram",
    "eigenfunction",
    "eigenvalues",
    "find_critical",
    "format_graph",
    "glue",
    "grad_lambda",
    "ground_energy",
    "hessian",
    "is_bipartite",
    "is_connected",
    "is_equipartition",
    "is_proper",
    "lambda_of_partition",
    "lambda_phi",
    "load_graph",
    "local_angles",
    "local_sections",
    "make_partition",
    "minimal_m",
    "mixed_minimax_check",
    "morse_index",
    "nodal_counts",
    "parse_graph",
    "phi_inverse",
    "phi_map",
    "phi_map_local",
    "rayleigh_quotient",
    "reconstruct_eigenvalue",
    "secular_value",
    "sup_norm",
    "verify_theorem",
    "vertex_values",
    "weyl_audit",
    "wrap_angle",
    "zeros",
]
