"""Design-space exploration: config sweeps, Pareto fronts and baseline-relative tables."""
from .pareto import (
    DEFAULT_AXES,
    RATIO_COLUMNS,
    baseline_row,
    compare_to_baseline,
    pareto_front,
    table_document,
    write_table,
)
from .sweep import (
    SCHEMA_VERSION,
    STAGES,
    SWEEP_COLUMNS,
    SweepError,
    WorkloadResult,
    WorkloadSpec,
    default_grid,
    run_workload,
    sweep,
    sweep_row,
    table_v_grid,
)

__all__ = [
    "DEFAULT_AXES",
    "RATIO_COLUMNS",
    "SCHEMA_VERSION",
    "STAGES",
    "SWEEP_COLUMNS",
    "SweepError",
    "WorkloadResult",
    "WorkloadSpec",
    "baseline_row",
    "compare_to_baseline",
    "default_grid",
    "pareto_front",
    "run_workload",
    "sweep",
    "sweep_row",
    "table_document",
    "table_v_grid",
    "write_table",
]
