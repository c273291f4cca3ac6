"""Mapper: enumerates and evaluates tilings of operators and schedules layer graphs."""
from .evaluate import (
    GemmEvaluator,
    LatencyEnergy,
    LevelCost,
    evaluate_mapping,
    mxu_cost,
    roofline_bound,
    trivial_mapping,
)
from .graph import LayerReport, OperatorResult, evaluate_graph, evaluate_ops
from .mapspace import (
    BRUTE_FORCE_MAX_DIM,
    FULL_SEARCH_LIMIT,
    Engine,
    GemmProblem,
    Mapping,
    MappingError,
    Mapspace,
    Tile,
    VectorProblem,
    divisor_mappings,
    enumerate_mappings,
    gemm_mapspace,
    gemm_mapspaces,
    tile_candidates,
    usable_capacity,
    vector_mapping,
)
from .search import (
    best_mapping,
    brute_force_best,
    candidates_for,
    clear_mapping_cache,
    mapping_trace,
    write_mapping_trace,
)

__all__ = [
    "BRUTE_FORCE_MAX_DIM",
    "FULL_SEARCH_LIMIT",
    "Engine",
    "GemmEvaluator",
    "GemmProblem",
    "LatencyEnergy",
    "LayerReport",
    "LevelCost",
    "Mapping",
    "MappingError",
    "Mapspace",
    "OperatorResult",
    "Tile",
    "VectorProblem",
    "best_mapping",
    "brute_force_best",
    "candidates_for",
    "clear_mapping_cache",
    "divisor_mappings",
    "enumerate_mappings",
    "evaluate_graph",
    "evaluate_mapping",
    "evaluate_ops",
    "gemm_mapspace",
    "gemm_mapspaces",
    "mapping_trace",
    "mxu_cost",
    "roofline_bound",
    "tile_candidates",
    "trivial_mapping",
    "usable_capacity",
    "vector_mapping",
    "write_mapping_trace",
]
