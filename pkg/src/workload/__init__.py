"""Workload IR: operators, layer graphs, model catalog and graph builders."""
from .builders import (
    build_dit_block,
    build_layer,
    build_llm_decode_layer,
    build_llm_prefill_layer,
    dit_tokens,
)
from .graph import GraphError, LayerGraph
from .models import (
    InferenceParams,
    ModelConfig,
    ModelFamily,
    WorkloadError,
    builtin_model,
    load_builtin_models,
    load_model,
    model_names,
    parse_model,
)
from .operators import (
    COLLECTIVE_KINDS,
    GEMM_CATEGORIES,
    VECTOR_KINDS,
    AllReduce,
    Category,
    Elementwise,
    Gelu,
    Gemm,
    KvCacheUpdate,
    LayerNorm,
    OperandBytes,
    Operator,
    OpKind,
    PointToPoint,
    Precision,
    Softmax,
    bytes_of,
    flops_of,
)

__all__ = [
    "COLLECTIVE_KINDS",
    "GEMM_CATEGORIES",
    "VECTOR_KINDS",
    "AllReduce",
    "Category",
    "Elementwise",
    "Gelu",
    "Gemm",
    "GraphError",
    "InferenceParams",
    "KvCacheUpdate",
    "LayerGraph",
    "LayerNorm",
    "ModelConfig",
    "ModelFamily",
    "OpKind",
    "OperandBytes",
    "Operator",
    "PointToPoint",
    "Precision",
    "Softmax",
    "WorkloadError",
    "build_dit_block",
    "build_layer",
    "build_llm_decode_layer",
    "build_llm_prefill_layer",
    "builtin_model",
    "bytes_of",
    "dit_tokens",
    "flops_of",
    "load_builtin_models",
    "load_model",
    "model_names",
    "parse_model",
]
