"""Design-space sweeps over hardware configs."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import pandas as pd
from loguru import logger

from src.config import get_settings
from src.energy import EnergyBreakdown
from src.hardware import (
    BASELINE_NAME,
    PRESETS,
    TpuConfig,
    area_proxy,
    peak_macs_per_cycle,
    table_v_names,
)
from src.mapping import MappingError, evaluate_graph
from src.parallel import (
    CapacityError,
    ParallelismError,
    ParallelismPlan,
    dit_end_to_end,
    llm_end_to_end,
    shard_graph,
)
from src.workload import InferenceParams, ModelConfig, ModelFamily, WorkloadError, build_layer

STAGES = ("prefill", "decode", "block", "end2end")

# Bump when columns are added, removed or change meaning
SCHEMA_VERSION = 1

SWEEP_COLUMNS = [
    "name",
    "workload",
    "kind",
    "array",
    "mxu_count",
    "peak_macs_per_mxu",
    "peak_macs_total",
    "area_proxy",
    "latency_s",
    "throughput",
    "mxu_energy_j",
    "total_energy_j",
    "avg_mxu_power_w",
    "feasible",
    "error",
]

INFEASIBLE_ERRORS = (MappingError, CapacityError, ParallelismError, WorkloadError)


class SweepError(Exception):
    """Error during design-space sweeps."""

    pass


@dataclass(frozen=True)
class WorkloadSpec:
    """What to evaluate at every grid point."""

    model: ModelConfig
    params: InferenceParams = field(default_factory=InferenceParams)
    stage: str = "end2end"
    decode_stride: int = 1
    n_steps: Optional[int] = None

    def __post_init__(self):
        if self.stage not in STAGES:
            raise SweepError(f"Unknown stage '{self.stage}' (expected one of {', '.join(STAGES)})")

    @property
    def label(self) -> str:
        return f"{self.model.name}:{self.stage}"


@dataclass(frozen=True)
class WorkloadResult:
    latency_s: float
    energy: EnergyBreakdown
    throughput: float = 0.0


def run_workload(spec: WorkloadSpec, cfg: TpuConfig, plan: Optional[ParallelismPlan] = None) -> WorkloadResult:
    """Latency and energy of a workload on one config.

    Single-stage workloads cost one (tensor-sharded) layer on one device;
    end-to-end workloads run the whole model through the plan.
    """
    plan = plan or ParallelismPlan()
    if spec.stage == "end2end":
        if spec.model.family is ModelFamily.LLM:
            report = llm_end_to_end(spec.model, spec.params, plan, cfg, decode_stride=spec.decode_stride, threads=1)
        else:
            report = dit_end_to_end(spec.model, spec.params, plan, cfg, n_steps=spec.n_steps)
        return WorkloadResult(report.latency_s, report.energy, report.throughput)

    graph = shard_graph(build_layer(spec.model, spec.params, spec.stage), plan.tp_degree)
    total = evaluate_graph(graph, cfg, threads=1).total
    return WorkloadResult(total.seconds, total.energy)


def config_columns(cfg: TpuConfig) -> dict:
    per_mxu, total = peak_macs_per_cycle(cfg)
    return {
        "name": cfg.name,
        "kind": cfg.mxu.kind,
        "array": cfg.mxu.label,
        "mxu_count": cfg.mxu_count,
        "peak_macs_per_mxu": per_mxu,
        "peak_macs_total": total,
        "area_proxy": area_proxy(cfg),
    }


def sweep_row(cfg: TpuConfig, spec: WorkloadSpec, plan: Optional[ParallelismPlan] = None) -> dict:
    """One table row; infeasible points are flagged rather than dropped."""
    row = config_columns(cfg)
    row["workload"] = spec.label
    try:
        result = run_workload(spec, cfg, plan)
    except INFEASIBLE_ERRORS as e:
        logger.warning("{} is infeasible for {}: {}", cfg.name, spec.label, e)
        row.update(
            latency_s=float("nan"),
            throughput=float("nan"),
            mxu_energy_j=float("nan"),
            total_energy_j=float("nan"),
            avg_mxu_power_w=float("nan"),
            feasible=False,
            error=str(e),
        )
        return row
    row.update(
        latency_s=result.latency_s,
        throughput=result.throughput,
        mxu_energy_j=result.energy.mxu_j,
        total_energy_j=result.energy.total,
        avg_mxu_power_w=result.energy.mxu_j / result.latency_s if result.latency_s else 0.0,
        feasible=True,
        error="",
    )
    return row


def sweep(
    grid: Sequence[TpuConfig],
    spec: WorkloadSpec,
    plan: Optional[ParallelismPlan] = None,
    threads: Optional[int] = None,
) -> pd.DataFrame:
    """Evaluate a workload at every grid point; rows follow grid order.

    Raises:
        SweepError: If the grid is empty.
    """
    if not grid:
        raise SweepError("sweep grid is empty")
    threads = threads or get_settings().threads
    logger.info("sweeping {} configs for {}", len(grid), spec.label)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda cfg: sweep_row(cfg, spec, plan), grid))
    else:
        rows = [sweep_row(cfg, spec, plan) for cfg in grid]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def table_v_grid() -> list[TpuConfig]:
    """The nine CIM design points (array dimension major, then MXU count)."""
    return [PRESETS[name] for name in table_v_names()]


def default_grid() -> list[TpuConfig]:
    """Baseline followed by the CIM design grid."""
    return [PRESETS[BASELINE_NAME], *table_v_grid()]
