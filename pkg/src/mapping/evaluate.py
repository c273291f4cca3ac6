"""Latency and energy of one operator under one mapping.

GEMMs run as two nested tile loops. The outer loop streams CMEM tiles from HBM
(coalesced to DRAM bursts); each CMEM tile is the compute step of the outer loop
and is itself an inner loop streaming VMEM tiles over OCI into the MXUs. Both
loops iterate m, n, then k innermost; the output tile is written back after its
last k step. Each loop overlaps loads with compute when its level is double
buffered. The MXUs of a chip split every VMEM tile's output columns.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil
from typing import Callable, Iterator

from src.energy import EnergyBreakdown, Traffic, op_energy
from src.engines import (
    GemmTile,
    cim_cycles,
    cim_mac_slots,
    elementwise_cycles,
    gelu_cycles,
    layernorm_cycles,
    softmax_cycles,
    systolic_cycles,
    systolic_mac_slots,
)
from src.hardware import CimGrid, TpuConfig
from src.memory import (
    Level,
    PipelineSegment,
    TransferLeg,
    allreduce_cycles,
    allreduce_traffic,
    chain,
    coalesced_bytes,
    p2p_cycles,
    transfer_cycles,
)
from src.workload import (
    AllReduce,
    Elementwise,
    Gelu,
    KvCacheUpdate,
    LayerNorm,
    Operator,
    PointToPoint,
    Precision,
    Softmax,
    bytes_of,
    flops_of,
)

from .mapspace import (
    Engine,
    GemmProblem,
    Mapping,
    MappingError,
    Tile,
    VectorProblem,
    usable_capacity,
)

UNIT_TILE = Tile(1, 1, 1)


@dataclass(frozen=True)
class LatencyEnergy:
    """Cost of one operator (or a sum of operators)."""

    cycles: float
    seconds: float
    energy: EnergyBreakdown
    utilization: float = 0.0
    traffic: Traffic = field(default_factory=Traffic)
    mac_slots: int = 0

    def __post_init__(self):
        if self.cycles < 0:
            raise ValueError(f"cycles must be >= 0, got {self.cycles}")
        if not 0.0 <= self.utilization <= 1.0:
            raise ValueError(f"utilization must be in [0, 1], got {self.utilization}")

    @classmethod
    def from_cycles(cls, cycles: float, cfg: TpuConfig, energy: EnergyBreakdown, **extra) -> "LatencyEnergy":
        return cls(cycles=cycles, seconds=cycles / cfg.frequency, energy=energy, **extra)

    @classmethod
    def zero(cls) -> "LatencyEnergy":
        return cls(cycles=0, seconds=0.0, energy=EnergyBreakdown())

    def __add__(self, other: "LatencyEnergy") -> "LatencyEnergy":
        return LatencyEnergy(
            cycles=self.cycles + other.cycles,
            seconds=self.seconds + other.seconds,
            energy=self.energy + other.energy,
            traffic=self.traffic + other.traffic,
            mac_slots=self.mac_slots + other.mac_slots,
        )

    def scaled(self, factor: int) -> "LatencyEnergy":
        """``factor`` back-to-back repetitions."""
        return LatencyEnergy(
            cycles=self.cycles * factor,
            seconds=self.seconds * factor,
            energy=self.energy.scaled(factor),
            utilization=self.utilization,
            traffic=self.traffic.scaled(factor),
            mac_slots=self.mac_slots * factor,
        )


# --- Tile loops ---


def _blocks(dim: int, size: int) -> list[tuple[int, int]]:
    """(block size, count) pairs covering ``dim``: full blocks, then the remainder."""
    full, rest = divmod(dim, size)
    blocks = [(size, full)] if full else []
    if rest:
        blocks.append((rest, 1))
    return blocks


def shape_counts(dims: Tile, tile: Tile) -> Iterator[tuple[Tile, bool, int]]:
    """Distinct tile shapes of a loop, whether they close a k sequence, and how often they occur."""
    k_blocks = _blocks(dims.K, tile.K)
    for m, m_count in _blocks(dims.M, tile.M):
        for n, n_count in _blocks(dims.N, tile.N):
            outer = m_count * n_count
            for index, (k, k_count) in enumerate(k_blocks):
                shape = Tile(m, k, n)
                if index < len(k_blocks) - 1:
                    yield shape, False, outer * k_count
                    continue
                if k_count > 1:
                    yield shape, False, outer * (k_count - 1)
                yield shape, True, outer


def loop_segment(dims: Tile, tile: Tile, step: Callable[[Tile, bool], PipelineSegment]) -> PipelineSegment:
    """Pipeline summary of the m, n, k loop nest; ``step(shape, closes_k)`` costs one iteration."""
    k_blocks = _blocks(dims.K, tile.K)
    m_parts = []
    for m, m_count in _blocks(dims.M, tile.M):
        n_parts = []
        for n, n_count in _blocks(dims.N, tile.N):
            k_parts = []
            for index, (k, k_count) in enumerate(k_blocks):
                shape = Tile(m, k, n)
                if index < len(k_blocks) - 1:
                    k_parts.append(step(shape, False).repeat(k_count))
                    continue
                if k_count > 1:
                    k_parts.append(step(shape, False).repeat(k_count - 1))
                k_parts.append(step(shape, True))
            n_parts.append(chain(k_parts).repeat(n_count))
        m_parts.append(chain(n_parts).repeat(m_count))
    return chain(m_parts)


# --- Engines ---


@lru_cache(maxsize=65536)
def mxu_cost(mxu, mxu_count: int, M: int, K: int, N: int, precision: Precision) -> tuple[int, int]:
    """(cycles, MAC slots) of one VMEM tile spread over ``mxu_count`` MXUs.

    Output columns are dealt out in ceil(N / count) shares; the busiest MXU sets
    the cycles and the last active MXU takes whatever remains.
    """
    share = ceil(N / mxu_count)
    full, rest = divmod(N, share)
    shares = [share] * full + ([rest] if rest else [])

    def run(columns: int) -> tuple[int, int]:
        tile = GemmTile(M, K, columns, precision)
        if isinstance(mxu, CimGrid):
            return cim_cycles(mxu, tile), cim_mac_slots(mxu, tile)
        return systolic_cycles(mxu.rows, mxu.cols, tile), systolic_mac_slots(mxu.rows, mxu.cols, tile)

    cycles, _ = run(share)
    return cycles, sum(run(columns)[1] for columns in shares)


@dataclass(frozen=True)
class LevelCost:
    """Cost of the inner (CMEM -> VMEM -> MXU) loop for one CMEM tile shape."""

    cycles: float
    oci_bytes: int
    vmem_bytes: int
    mac_slots: int


class GemmEvaluator:
    """Evaluates mappings of one GEMM on one config, caching inner-loop costs across mappings."""

    def __init__(self, op: Operator, cfg: TpuConfig):
        self.op = op
        self.cfg = cfg
        self.problem = GemmProblem.of(op)
        self.width = self.problem.width
        self._inner: dict[tuple[Tile, Tile, bool], LevelCost] = {}

    def _leg(self, level: Level, bytes_: int, bandwidth: float) -> int:
        return transfer_cycles(TransferLeg(level, bytes_, bandwidth, self.cfg.transfer_latency_cycles))

    def _hbm_bytes(self, shape: Tile, closes_k: bool) -> tuple[int, int]:
        """Coalesced (read, write) HBM bytes of one CMEM step."""
        e, burst, dims = self.width, self.cfg.burst_bytes, self.problem
        read = coalesced_bytes(shape.M, shape.K * e, dims.K * e, burst)
        read += coalesced_bytes(shape.K, shape.N * e, dims.N * e, burst)
        write = coalesced_bytes(shape.M, shape.N * e, dims.N * e, burst) if closes_k else 0
        return read, write

    def inner(self, shape: Tile, vmem_tile: Tile, double_buffered: bool = True) -> LevelCost:
        key = (shape, vmem_tile, double_buffered)
        if key in self._inner:
            return self._inner[key]
        cfg, e = self.cfg, self.width
        tile = vmem_tile.clipped(shape)
        oci = cfg.oci_bytes_per_cycle

        def step(part: Tile, closes_k: bool) -> PipelineSegment:
            compute, _ = mxu_cost(cfg.mxu, cfg.mxu_count, part.M, part.K, part.N, self.problem.precision)
            read = self._leg(Level.CMEM_VMEM, (part.M * part.K + part.K * part.N) * e, oci)
            write = self._leg(Level.CMEM_VMEM, part.M * part.N * e, oci) if closes_k else 0
            return PipelineSegment.step(compute, read, write)

        oci_bytes = vmem_bytes = slots = 0
        for part, closes_k, count in shape_counts(shape, tile):
            oci_bytes += count * (part.M * part.K + part.K * part.N + (part.M * part.N if closes_k else 0)) * e
            vmem_bytes += count * part.working_set(e)
            slots += count * mxu_cost(cfg.mxu, cfg.mxu_count, part.M, part.K, part.N, self.problem.precision)[1]

        cost = LevelCost(
            cycles=loop_segment(shape, tile, step).total(double_buffered),
            oci_bytes=oci_bytes,
            vmem_bytes=vmem_bytes,
            mac_slots=slots,
        )
        self._inner[key] = cost
        return cost

    def check(self, mapping: Mapping):
        """Raise MappingError unless the mapping fits the operator and both memory levels."""
        dims, cfg = self.problem.dims, self.cfg
        if mapping.engine is not Engine.MXU:
            raise MappingError(f"GEMM {self.op.name!r} must run on the MXU, got {mapping.engine.value}")
        if not mapping.cmem_tile.fits_within(dims):
            raise MappingError(f"cmem tile {mapping.cmem_tile.as_tuple()} exceeds {dims.as_tuple()}")
        levels = (
            ("cmem", mapping.cmem_tile, cfg.cmem_bytes, mapping.double_buffer_cmem),
            ("vmem", mapping.vmem_tile, cfg.vmem_bytes, mapping.double_buffer_vmem),
        )
        for level, tile, capacity, double_buffered in levels:
            if tile.working_set(self.width) > usable_capacity(capacity, double_buffered):
                raise MappingError(
                    f"{level} tile {tile.as_tuple()} needs {tile.working_set(self.width)} B, "
                    f"over {usable_capacity(capacity, double_buffered)} B available"
                )

    def evaluate(self, mapping: Mapping) -> LatencyEnergy:
        self.check(mapping)
        cfg, problem = self.cfg, self.problem
        hbm = cfg.hbm_bytes_per_cycle

        def step(shape: Tile, closes_k: bool) -> PipelineSegment:
            read, write = self._hbm_bytes(shape, closes_k)
            compute = self.inner(shape, mapping.vmem_tile, mapping.double_buffer_vmem).cycles
            return PipelineSegment.step(compute, self._leg(Level.HBM_CMEM, read, hbm), self._leg(Level.HBM_CMEM, write, hbm))

        segment = loop_segment(problem.dims, mapping.cmem_tile, step).repeat(problem.batch)
        cycles = segment.total(mapping.double_buffer_cmem)

        hbm_bytes = oci_bytes = vmem_bytes = slots = 0
        for shape, closes_k, count in shape_counts(problem.dims, mapping.cmem_tile):
            count *= problem.batch
            inner = self.inner(shape, mapping.vmem_tile, mapping.double_buffer_vmem)
            hbm_bytes += count * sum(self._hbm_bytes(shape, closes_k))
            oci_bytes += count * inner.oci_bytes
            vmem_bytes += count * inner.vmem_bytes
            slots += count * inner.mac_slots

        traffic = Traffic(hbm=hbm_bytes, oci=oci_bytes, vmem=vmem_bytes)
        macs = self.op.kind.macs
        return LatencyEnergy.from_cycles(
            cycles,
            cfg,
            op_energy(cfg, traffic, macs=slots),
            utilization=macs / (cfg.peak_macs_per_cycle * cycles),
            traffic=traffic,
            mac_slots=slots,
        )


# --- Vector, KV and collective operators ---


def _vpu_cycles(op: Operator, cfg: TpuConfig, rows: int, cols: int) -> int:
    kind, vpu = op.kind, cfg.vpu
    if isinstance(kind, Softmax):
        return softmax_cycles(vpu, rows, cols)
    if isinstance(kind, LayerNorm):
        return layernorm_cycles(vpu, rows, cols)
    if isinstance(kind, Gelu):
        return gelu_cycles(vpu, rows * cols)
    if isinstance(kind, Elementwise):
        return elementwise_cycles(vpu, rows * cols, kind.ops_per_element)
    raise MappingError(f"operator {op.name!r} does not run on the VPU")


def _evaluate_vector(op: Operator, mapping: Mapping, cfg: TpuConfig) -> LatencyEnergy:
    """Row-tiled VPU operator: rows stream HBM -> CMEM -> VMEM, results stream back."""
    if mapping.engine is not Engine.VPU:
        raise MappingError(f"vector operator {op.name!r} must run on the VPU")
    problem = VectorProblem.of(op, cfg.vpu.lanes, mapping.vmem_tile.K)
    row_bytes, latency = problem.row_bytes, cfg.transfer_latency_cycles
    cmem_rows, vmem_rows = mapping.cmem_tile.M, mapping.vmem_tile.M

    def oci_leg(rows: int) -> int:
        return transfer_cycles(TransferLeg(Level.CMEM_VMEM, rows * row_bytes, cfg.oci_bytes_per_cycle, latency))

    def hbm_leg(bytes_: int) -> int:
        return transfer_cycles(TransferLeg(Level.HBM_CMEM, bytes_, cfg.hbm_bytes_per_cycle, latency))

    def hbm_rows(rows: int) -> int:
        return coalesced_bytes(rows, row_bytes, row_bytes, cfg.burst_bytes)

    def inner_step(shape: Tile, closes_k: bool) -> PipelineSegment:
        return PipelineSegment.step(_vpu_cycles(op, cfg, shape.M, problem.cols), oci_leg(shape.M), oci_leg(shape.M))

    inner = {
        rows: loop_segment(Tile(rows, 1, 1), Tile(vmem_rows, 1, 1), inner_step).total(mapping.double_buffer_vmem)
        for rows, _ in _blocks(problem.rows, cmem_rows)
    }

    def outer_step(shape: Tile, closes_k: bool) -> PipelineSegment:
        read = hbm_leg(hbm_rows(shape.M) + problem.weight_bytes)
        return PipelineSegment.step(inner[shape.M], read, hbm_leg(hbm_rows(shape.M)))

    cycles = loop_segment(Tile(problem.rows, 1, 1), Tile(cmem_rows, 1, 1), outer_step).total(
        mapping.double_buffer_cmem
    )

    hbm_bytes = oci_bytes = vpu_cycles = 0
    for rows, count in _blocks(problem.rows, cmem_rows):
        hbm_bytes += count * (2 * hbm_rows(rows) + problem.weight_bytes)
        for part, part_count in _blocks(rows, vmem_rows):
            oci_bytes += count * part_count * 2 * part * row_bytes
            vpu_cycles += count * part_count * _vpu_cycles(op, cfg, part, problem.cols)

    traffic = Traffic(hbm=hbm_bytes, oci=oci_bytes, vmem=oci_bytes)
    lane_ops = vpu_cycles * cfg.vpu.lanes
    return LatencyEnergy.from_cycles(
        cycles,
        cfg,
        op_energy(cfg, traffic, lane_ops=lane_ops),
        utilization=flops_of(op) / (cfg.vpu.lanes * cycles),
        traffic=traffic,
    )


def _evaluate_kv_update(op: Operator, cfg: TpuConfig) -> LatencyEnergy:
    """New K/V rows stream from VMEM through CMEM to the HBM-resident cache."""
    size = op.kind.bytes
    latency = cfg.transfer_latency_cycles
    cycles = max(
        transfer_cycles(TransferLeg(Level.HBM_CMEM, size, cfg.hbm_bytes_per_cycle, latency)),
        transfer_cycles(TransferLeg(Level.CMEM_VMEM, size, cfg.oci_bytes_per_cycle, latency)),
    )
    traffic = Traffic(hbm=size, oci=size)
    return LatencyEnergy.from_cycles(cycles, cfg, op_energy(cfg, traffic), traffic=traffic)


def _collective_cost(op: Operator, cfg: TpuConfig) -> tuple[float, float]:
    """(cycles, bytes sent per device) of a collective."""
    kind = op.kind
    if isinstance(kind, AllReduce):
        if kind.group_size < 2:
            return 0.0, 0.0
        cycles = allreduce_cycles(kind.bytes, kind.group_size, cfg.ici_bytes_per_cycle, cfg.ici_links)
        return cycles, allreduce_traffic(kind.bytes, kind.group_size)
    return p2p_cycles(kind.bytes, cfg.ici_bytes_per_cycle), float(kind.bytes)


def _evaluate_collective(op: Operator, cfg: TpuConfig) -> LatencyEnergy:
    cycles, sent = _collective_cost(op, cfg)
    traffic = Traffic(ici=sent)
    return LatencyEnergy.from_cycles(cycles, cfg, op_energy(cfg, traffic), traffic=traffic)


def trivial_mapping(op: Operator) -> Mapping:
    engine = Engine.ICI if op.is_collective else Engine.DMA
    return Mapping(UNIT_TILE, UNIT_TILE, engine=engine)


def evaluate_mapping(op: Operator, mapping: Mapping, cfg: TpuConfig) -> LatencyEnergy:
    """Cycles, seconds, energy and utilization of ``op`` under ``mapping``.

    Raises:
        MappingError: If the mapping does not fit the operator or the memory levels.
    """
    if op.is_gemm:
        return GemmEvaluator(op, cfg).evaluate(mapping)
    if op.is_vector:
        return _evaluate_vector(op, mapping, cfg)
    if isinstance(op.kind, KvCacheUpdate):
        return _evaluate_kv_update(op, cfg)
    if isinstance(op.kind, (AllReduce, PointToPoint)):
        return _evaluate_collective(op, cfg)
    raise MappingError(f"cannot evaluate operator {op.name!r} of kind {type(op.kind).__name__}")


def roofline_bound(op: Operator, cfg: TpuConfig) -> tuple[float, float]:
    """(compute-bound, memory-bound) lower bounds on an operator's cycles."""
    kind = op.kind
    if op.is_collective:
        if isinstance(kind, AllReduce):
            if kind.group_size < 2:
                return 0.0, 0.0
            return 0.0, allreduce_traffic(kind.bytes, kind.group_size) / (cfg.ici_links * cfg.ici_bytes_per_cycle)
        return 0.0, kind.bytes / cfg.ici_bytes_per_cycle
    memory = bytes_of(op).total / cfg.hbm_bytes_per_cycle
    if op.is_gemm:
        return kind.macs / cfg.peak_macs_per_cycle, memory
    if op.is_vector:
        return flops_of(op) / cfg.vpu.lanes, memory
    return 0.0, memory
