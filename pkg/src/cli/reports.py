"""Pydantic report documents and their JSON, CSV and text renderings."""
from datetime import datetime, timezone
from typing import Literal, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict

from src.energy import EnergyBreakdown
from src.hardware import TpuConfig, area_proxy, peak_macs_per_cycle
from src.mapping import LayerReport
from src.parallel import EndToEndReport
from src.workload import InferenceParams

REPORT_SCHEMA_VERSION = 1
REPORT_FORMATS = ("json", "csv", "text")


# --- Shared Schemas ---


class ReportBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class EnergyDoc(ReportBase):
    """Energy per component in joules."""

    mxu_j: float
    vpu_j: float
    vmem_j: float
    cmem_j: float
    hbm_j: float
    ici_j: float
    total_j: float

    @classmethod
    def of(cls, energy: EnergyBreakdown) -> "EnergyDoc":
        return cls(**energy.as_dict())


class ConfigEcho(ReportBase):
    """The hardware config a report was produced on, with its flagged assumptions."""

    name: str
    mxu: str
    mxu_count: int
    peak_macs_per_mxu: float
    peak_macs_total: float
    area_proxy: float
    frequency_hz: float
    assumptions: list[str]

    @classmethod
    def of(cls, cfg: TpuConfig) -> "ConfigEcho":
        per_mxu, total = peak_macs_per_cycle(cfg)
        return cls(
            name=cfg.name,
            mxu=cfg.mxu.label,
            mxu_count=cfg.mxu_count,
            peak_macs_per_mxu=per_mxu,
            peak_macs_total=total,
            area_proxy=area_proxy(cfg),
            frequency_hz=cfg.frequency,
            assumptions=cfg.assumptions,
        )


class WorkloadEcho(ReportBase):
    model: str
    stage: str
    batch: int
    seq_in: int
    decode_pos: int
    out_len: int
    image_resolution: int
    precision: str
    plan: str

    @classmethod
    def of(cls, model: str, stage: str, params: InferenceParams, plan: str) -> "WorkloadEcho":
        return cls(
            model=model,
            stage=stage,
            batch=params.batch,
            seq_in=params.seq_in,
            decode_pos=params.decode_pos,
            out_len=params.out_len,
            image_resolution=params.image_resolution,
            precision=params.precision.value,
            plan=plan,
        )


# --- Layer Report Schemas ---


class OperatorDoc(ReportBase):
    name: str
    category: str
    engine: str
    cmem_tile: list[int]
    vmem_tile: list[int]
    cycles: float
    seconds: float
    utilization: float
    energy: EnergyDoc


class CategoryDoc(ReportBase):
    category: str
    cycles: float
    seconds: float
    share: float
    energy_j: float


class LayerReportDoc(ReportBase):
    """Per-operator and per-category breakdown of one layer."""

    schema_version: int = REPORT_SCHEMA_VERSION
    report: Literal["layer"] = "layer"
    config: ConfigEcho
    workload: WorkloadEcho
    operators: list[OperatorDoc]
    categories: list[CategoryDoc]
    total_cycles: float
    latency_s: float
    energy: EnergyDoc
    generated_at: Optional[str] = None


# --- End-to-end Report Schemas ---


class PhaseDoc(ReportBase):
    name: str
    cycles: float
    latency_s: float
    energy: EnergyDoc


class EndToEndReportDoc(ReportBase):
    """Whole-inference latency, throughput and energy."""

    schema_version: int = REPORT_SCHEMA_VERSION
    report: Literal["end2end"] = "end2end"
    config: ConfigEcho
    workload: WorkloadEcho
    devices: int
    phases: list[PhaseDoc]
    latency_s: float
    throughput: float
    throughput_unit: str
    average_mxu_power_w: float
    energy: EnergyDoc
    generated_at: Optional[str] = None


ReportDoc = LayerReportDoc | EndToEndReportDoc


def timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def layer_document(report: LayerReport, cfg: TpuConfig, workload: WorkloadEcho, stamp: bool = False) -> LayerReportDoc:
    operators = [
        OperatorDoc(
            name=item.name,
            category=item.category.value,
            engine=item.mapping.engine.value,
            cmem_tile=list(item.mapping.cmem_tile.as_tuple()),
            vmem_tile=list(item.mapping.vmem_tile.as_tuple()),
            cycles=item.result.cycles,
            seconds=item.result.seconds,
            utilization=item.result.utilization,
            energy=EnergyDoc.of(item.result.energy),
        )
        for item in report.operators
    ]
    shares = report.category_shares()
    categories = [
        CategoryDoc(
            category=category.value,
            cycles=cost.cycles,
            seconds=cost.seconds,
            share=shares[category],
            energy_j=cost.energy.total,
        )
        for category, cost in report.by_category().items()
    ]
    return LayerReportDoc(
        config=ConfigEcho.of(cfg),
        workload=workload,
        operators=operators,
        categories=categories,
        total_cycles=report.total.cycles,
        latency_s=report.total.seconds,
        energy=EnergyDoc.of(report.total.energy),
        generated_at=timestamp() if stamp else None,
    )


def end_to_end_document(
    report: EndToEndReport, cfg: TpuConfig, workload: WorkloadEcho, stamp: bool = False
) -> EndToEndReportDoc:
    return EndToEndReportDoc(
        config=ConfigEcho.of(cfg),
        workload=workload,
        devices=report.devices,
        phases=[
            PhaseDoc(name=phase.name, cycles=phase.cycles, latency_s=phase.seconds, energy=EnergyDoc.of(phase.energy))
            for phase in report.phases
        ],
        latency_s=report.latency_s,
        throughput=report.throughput,
        throughput_unit=f"{report.unit}/s",
        average_mxu_power_w=report.average_mxu_power_w,
        energy=EnergyDoc.of(report.energy),
        generated_at=timestamp() if stamp else None,
    )


# --- Rendering ---


def _csv_rows(doc: ReportDoc) -> tuple[list[str], list[list]]:
    if isinstance(doc, LayerReportDoc):
        header = ["operator", "category", "engine", "cycles", "seconds", "utilization", "energy_j"]
        rows = [
            [op.name, op.category, op.engine, op.cycles, op.seconds, op.utilization, op.energy.total_j]
            for op in doc.operators
        ]
        rows.append(["total", "", "", doc.total_cycles, doc.latency_s, "", doc.energy.total_j])
        return header, rows
    header = ["phase", "cycles", "latency_s", "mxu_energy_j", "energy_j"]
    rows = [[p.name, p.cycles, p.latency_s, p.energy.mxu_j, p.energy.total_j] for p in doc.phases]
    rows.append(["total", "", doc.latency_s, doc.energy.mxu_j, doc.energy.total_j])
    return header, rows


def _text(doc: ReportDoc) -> str:
    cfg = doc.config
    lines = [
        f"config: {cfg.name} ({cfg.mxu_count} x {cfg.mxu}, {cfg.peak_macs_total:.0f} MACs/cycle)",
        f"workload: {doc.workload.model} {doc.workload.stage} batch={doc.workload.batch} "
        f"precision={doc.workload.precision} plan={doc.workload.plan}",
    ]
    if isinstance(doc, LayerReportDoc):
        lines.append("")
        lines.append(f"{'operator':<18}{'category':<18}{'cycles':>14}{'util':>8}{'energy (uJ)':>14}")
        for op in doc.operators:
            lines.append(
                f"{op.name:<18}{op.category:<18}{op.cycles:>14.0f}{op.utilization:>8.2f}{op.energy.total_j * 1e6:>14.3f}"
            )
        lines.append("")
        lines.append(f"{'category':<18}{'share':>8}")
        for category in doc.categories:
            lines.append(f"{category.category:<18}{category.share:>8.1%}")
        lines.append("")
        lines.append(f"latency: {doc.latency_s * 1e3:.4f} ms ({doc.total_cycles:.0f} cycles)")
    else:
        lines.append("")
        for phase in doc.phases:
            lines.append(f"{phase.name:<10}{phase.latency_s:>12.4f} s{phase.energy.total_j:>14.4f} J")
        lines.append("")
        lines.append(f"latency: {doc.latency_s:.4f} s on {doc.devices} device(s)")
        lines.append(f"throughput: {doc.throughput:.2f} {doc.throughput_unit}")
    lines.append(f"energy: {doc.energy.total_j:.6g} J (MXU {doc.energy.mxu_j:.6g} J)")
    for note in cfg.assumptions:
        lines.append(f"assumption: {note}")
    return "\n".join(lines) + "\n"


def render(doc: ReportDoc, fmt: str) -> str:
    """Render a report document as json, csv or text."""
    if fmt == "json":
        return doc.model_dump_json(indent=2) + "\n"
    if fmt == "csv":
        header, rows = _csv_rows(doc)
        return pd.DataFrame(rows, columns=header).to_csv(index=False, lineterminator="\n")
    if fmt == "text":
        return _text(doc)
    raise ValueError(f"Unknown report format '{fmt}'")
