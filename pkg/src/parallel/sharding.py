"""Megatron-style tensor-parallel sharding of layer graphs.

QKV, FFN-up and conditioning GEMMs split their output columns; projection and
FFN-down GEMMs split their reduction dimension and are followed by an all-reduce
of the activations. Attention splits heads. Norms, elementwise ops and the KV
cache split their rows across devices, so the per-device work times the degree
equals the unsharded work.
"""
from dataclasses import replace

from src.workload import (
    AllReduce,
    Category,
    Elementwise,
    Gelu,
    Gemm,
    KvCacheUpdate,
    LayerGraph,
    LayerNorm,
    Operator,
    Softmax,
)

from .plan import ParallelismError

COLUMN_PARALLEL = ("qkv", "ffn1", "cond")
ROW_PARALLEL = ("proj", "ffn2")
HEAD_PARALLEL = ("qk", "sv")


def _split(value: int, degree: int, what: str) -> int:
    if value % degree:
        raise ParallelismError(f"{what} = {value} is not divisible by tensor-parallel degree {degree}")
    return value // degree


def _shard_op(op: Operator, degree: int) -> Operator:
    kind = op.kind
    if isinstance(kind, Gemm):
        if op.name in COLUMN_PARALLEL:
            return op.with_kind(replace(kind, N=_split(kind.N, degree, f"{op.name} columns")))
        if op.name in ROW_PARALLEL:
            return op.with_kind(replace(kind, K=_split(kind.K, degree, f"{op.name} reduction")))
        if op.name in HEAD_PARALLEL:
            return op.with_kind(replace(kind, batch=_split(kind.batch, degree, f"{op.name} batch x heads")))
        raise ParallelismError(f"no sharding rule for GEMM {op.name!r}")
    if isinstance(kind, (Softmax, LayerNorm)):
        return op.with_kind(replace(kind, rows=_split(kind.rows, degree, f"{op.name} rows")))
    if isinstance(kind, (Gelu, Elementwise)):
        return op.with_kind(replace(kind, elements=_split(kind.elements, degree, f"{op.name} elements")))
    if isinstance(kind, KvCacheUpdate):
        return op.with_kind(replace(kind, bytes=_split(kind.bytes, degree, f"{op.name} bytes")))
    raise ParallelismError(f"cannot shard operator {op.name!r}")


def shard_graph(graph: LayerGraph, tp_degree: int) -> LayerGraph:
    """Per-device graph under ``tp_degree``-way tensor parallelism.

    Raises:
        ParallelismError: If heads or any sharded dimension do not divide evenly.
    """
    if tp_degree < 1:
        raise ParallelismError(f"tp_degree must be >= 1, got {tp_degree}")
    if tp_degree == 1:
        return graph
    heads = graph.meta.get("heads")
    if heads is not None and heads % tp_degree:
        raise ParallelismError(f"{heads} heads do not divide across {tp_degree} devices")

    ops: list[Operator] = []
    renamed: dict[str, str] = {}
    for op in graph.ops:
        deps = tuple(renamed.get(dep, dep) for dep in op.deps)
        ops.append(replace(_shard_op(op, tp_degree), deps=deps))
        if op.name in ROW_PARALLEL:
            gemm = op.kind
            reduce_name = f"{op.name}_allreduce"
            activation_bytes = gemm.batch * gemm.M * gemm.N * op.precision.bytes
            ops.append(
                Operator(
                    reduce_name,
                    AllReduce(activation_bytes, tp_degree),
                    Category.COMMUNICATION,
                    op.precision,
                    (op.name,),
                )
            )
            renamed[op.name] = reduce_name

    meta = dict(graph.meta, tp_degree=tp_degree)
    return LayerGraph(name=f"{graph.name}-tp{tp_degree}", ops=tuple(ops), meta=meta)
