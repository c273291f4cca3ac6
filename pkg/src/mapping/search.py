"""Mapping search: latency-optimal mapping per operator, plus a brute-force oracle."""
import json
from functools import lru_cache
from pathlib import Path
from typing import Union

from loguru import logger

from src.config import get_settings
from src.hardware import TpuConfig
from src.workload import Category, Operator, OpKind, Precision

from .evaluate import GemmEvaluator, LatencyEnergy, evaluate_mapping, trivial_mapping
from .mapspace import Mapping, MappingError, divisor_mappings, gemm_mapspaces, vector_mapping

Candidate = tuple[Mapping, LatencyEnergy]


def _rank(candidate: Candidate) -> tuple:
    mapping, result = candidate
    return (result.cycles, result.energy.total, mapping.sort_key)


def _gemm_candidates(op: Operator, cfg: TpuConfig) -> list[Candidate]:
    """Evaluated candidates of a GEMM.

    Double- and single-buffered schedules each get their own mapspace.
    Exhaustive mapspaces evaluate every pair. Pruned ones pick, for each CMEM
    tile, the VMEM tile with the fastest inner loop and evaluate only that pair.
    """
    evaluator = GemmEvaluator(op, cfg)
    candidates = []
    for space in gemm_mapspaces(op, cfg):
        if space.exhaustive:
            candidates.extend((mapping, evaluator.evaluate(mapping)) for mapping in space.mappings())
            continue
        buffered = space.double_buffered
        for cmem in space.cmem_tiles:
            vmem_options = {vmem.clipped(cmem) for vmem in space.vmem_tiles}
            vmem = min(
                vmem_options,
                key=lambda tile: (evaluator.inner(cmem, tile, buffered).cycles, tile.as_tuple()),
            )
            mapping = Mapping(cmem, vmem, buffered, buffered)
            candidates.append((mapping, evaluator.evaluate(mapping)))
    return candidates


def candidates_for(op: Operator, cfg: TpuConfig) -> list[Candidate]:
    """Every evaluated candidate mapping of an operator."""
    if op.is_gemm:
        return _gemm_candidates(op, cfg)
    mapping = vector_mapping(op, cfg) if op.is_vector else trivial_mapping(op)
    return [(mapping, evaluate_mapping(op, mapping, cfg))]


@lru_cache(maxsize=get_settings().mapping_cache_size)
def _best_for_kind(kind: OpKind, precision: Precision, cfg: TpuConfig) -> Candidate:
    # Name and category never affect cost, so cache on the shape alone
    op = Operator(name=type(kind).__name__.lower(), kind=kind, category=Category.QKV, precision=precision)
    candidates = candidates_for(op, cfg)
    if not candidates:
        raise MappingError(f"no candidate mapping for {op.name} on {cfg.name}")
    best = min(candidates, key=_rank)
    logger.debug(
        "best mapping for {} on {}: {} in {} cycles ({} candidates)",
        kind, cfg.name, best[0].describe(), best[1].cycles, len(candidates),
    )
    return best


def best_mapping(op: Operator, cfg: TpuConfig) -> Candidate:
    """Latency-optimal mapping of an operator.

    Ties on cycles go to lower energy, then to the lexicographically smaller
    tile tuple, so the result is deterministic.

    Raises:
        MappingError: If the operator has no feasible mapping on ``cfg``.
    """
    return _best_for_kind(op.kind, op.precision, cfg)


def brute_force_best(op: Operator, cfg: TpuConfig) -> Candidate:
    """Best mapping over the full divisor mapspace, for GEMMs with every dimension <= 256."""
    if not op.is_gemm:
        return best_mapping(op, cfg)
    evaluator = GemmEvaluator(op, cfg)
    return min(((mapping, evaluator.evaluate(mapping)) for mapping in divisor_mappings(op, cfg)), key=_rank)


def clear_mapping_cache():
    _best_for_kind.cache_clear()


def mapping_trace(op: Operator, cfg: TpuConfig) -> list[dict]:
    """Every candidate with its cost, best first."""
    trace = []
    for mapping, result in sorted(candidates_for(op, cfg), key=_rank):
        entry = mapping.describe()
        entry.update(
            cycles=result.cycles,
            seconds=result.seconds,
            energy_j=result.energy.total,
            utilization=result.utilization,
        )
        trace.append(entry)
    return trace


def write_mapping_trace(ops: list[Operator], cfg: TpuConfig, path: Union[str, Path]) -> Path:
    """Dump the candidate trace of each operator as JSON."""
    path = Path(path)
    document = {
        "config": cfg.name,
        "operators": [{"name": op.name, "candidates": mapping_trace(op, cfg)} for op in ops],
    }
    path.write_text(json.dumps(document, indent=2))
    logger.info("wrote mapping trace for {} operators to {}", len(ops), path)
    return path
