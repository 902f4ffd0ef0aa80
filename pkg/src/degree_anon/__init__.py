"""Multi-parameterized k-degree anonymization with exact ILP realization."""

__version__ = "0.1.0"

from .anonymizer import (
    AnonymizationParams,
    AnonymizedSequence,
    ChangeVector,
    ChunkParams,
    anonymize_sequence,
    change_vector,
    partition_chunks,
    verify_k_anonymous,
)
from .clustering import Clustering, detect_communities, precision_error, precision_index
from .errors import (
    DuplicateEdgeWarning,
    GraphValidationError,
    InfeasibleError,
    InvalidPlanError,
    ParameterError,
    ParseError,
    SelfLoopWarning,
    SolverTimeoutError,
)
from .graph import DegreeSequence, EditPlan, Graph, apply_edits, degree_sequence, load_graph, write_graph
from .metrics import (
    UtilityReport,
    distance_metrics,
    eigen_metrics,
    structure_metrics,
    utility_error_report,
)
from .pipeline import AnonymizationResult, anonymize_graph
from .realization import RELAXED, STRICT, RealizationMode, build_relaxed_model, build_strict_model, realize

__all__ = [
    "AnonymizationParams",
    "AnonymizationResult",
    "AnonymizedSequence",
    "ChangeVector",
    "ChunkParams",
    "Clustering",
    "DegreeSequence",
    "DuplicateEdgeWarning",
    "EditPlan",
    "Graph",
    "GraphValidationError",
    "InfeasibleError",
    "InvalidPlanError",
    "ParameterError",
    "ParseError",
    "RELAXED",
    "RealizationMode",
    "STRICT",
    "SelfLoopWarning",
    "SolverTimeoutError",
    "UtilityReport",
    "anonymize_graph",
    "anonymize_sequence",
    "apply_edits",
    "build_relaxed_model",
    "build_strict_model",
    "change_vector",
    "degree_sequence",
    "detect_communities",
    "distance_metrics",
    "eigen_metrics",
    "load_graph",
    "partition_chunks",
    "precision_error",
    "precision_index",
    "realize",
    "structure_metrics",
    "utility_error_report",
    "verify_k_anonymous",
    "write_graph",
]
