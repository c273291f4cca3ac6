"""Shape-level operator IR."""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Union


class Precision(str, Enum):
    INT8 = "int8"
    BF16 = "bf16"

    @property
    def bytes(self) -> int:
        return 1 if self is Precision.INT8 else 2


class Category(str, Enum):
    """Report rollup buckets."""

    QKV = "qkv"
    ATTENTION = "attention"
    PROJECTION = "projection"
    FFN = "ffn"
    NORM_ELEMENTWISE = "norm_elementwise"
    KV = "kv"
    CONDITIONING = "conditioning"
    COMMUNICATION = "communication"


GEMM_CATEGORIES = (Category.QKV, Category.PROJECTION, Category.FFN)


def _require_positive(**dims):
    for name, value in dims.items():
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")


@dataclass(frozen=True)
class Gemm:
    """Batched matrix multiply: batch x (M x K) @ (K x N).

    ``weight_shared`` marks linear layers whose K x N operand is one weight
    matrix reused by every batch element.
    """

    batch: int
    M: int
    K: int
    N: int
    weight_shared: bool = False

    def __post_init__(self):
        _require_positive(batch=self.batch, M=self.M, K=self.K, N=self.N)

    @property
    def macs(self) -> int:
        return self.batch * self.M * self.K * self.N


@dataclass(frozen=True)
class Softmax:
    rows: int
    cols: int

    def __post_init__(self):
        _require_positive(rows=self.rows, cols=self.cols)


@dataclass(frozen=True)
class LayerNorm:
    rows: int
    cols: int

    def __post_init__(self):
        _require_positive(rows=self.rows, cols=self.cols)


@dataclass(frozen=True)
class Gelu:
    elements: int

    def __post_init__(self):
        _require_positive(elements=self.elements)


@dataclass(frozen=True)
class Elementwise:
    elements: int
    ops_per_element: int = 1

    def __post_init__(self):
        _require_positive(elements=self.elements, ops_per_element=self.ops_per_element)


@dataclass(frozen=True)
class KvCacheUpdate:
    bytes: int

    def __post_init__(self):
        _require_positive(bytes=self.bytes)


@dataclass(frozen=True)
class AllReduce:
    bytes: int
    group_size: int

    def __post_init__(self):
        _require_positive(bytes=self.bytes, group_size=self.group_size)


@dataclass(frozen=True)
class PointToPoint:
    bytes: int

    def __post_init__(self):
        _require_positive(bytes=self.bytes)


OpKind = Union[Gemm, Softmax, LayerNorm, Gelu, Elementwise, KvCacheUpdate, AllReduce, PointToPoint]
VECTOR_KINDS = (Softmax, LayerNorm, Gelu, Elementwise)
COLLECTIVE_KINDS = (AllReduce, PointToPoint)


@dataclass(frozen=True)
class Operator:
    """One node of a layer graph."""

    name: str
    kind: OpKind
    category: Category
    precision: Precision = Precision.INT8
    deps: tuple[str, ...] = field(default_factory=tuple)

    @property
    def is_gemm(self) -> bool:
        return isinstance(self.kind, Gemm)

    @property
    def is_vector(self) -> bool:
        return isinstance(self.kind, VECTOR_KINDS)

    @property
    def is_collective(self) -> bool:
        return isinstance(self.kind, COLLECTIVE_KINDS)

    def with_kind(self, kind: OpKind) -> "Operator":
        return replace(self, kind=kind)


@dataclass(frozen=True)
class OperandBytes:
    """Operand footprint of one operator."""

    input: int
    weight: int
    output: int

    @property
    def total(self) -> int:
        return self.input + self.weight + self.output


def flops_of(op: Operator) -> int:
    """Arithmetic operations performed by an operator (a MAC counts as 2)."""
    kind = op.kind
    if isinstance(kind, Gemm):
        return 2 * kind.macs
    if isinstance(kind, Softmax):
        # Online softmax: max, rescaled exp-sum and normalize per element, plus 2 per row
        return kind.rows * (3 * kind.cols + 2)
    if isinstance(kind, LayerNorm):
        return 5 * kind.rows * kind.cols
    if isinstance(kind, Gelu):
        # 3 mul, 2 add and one tanh per element
        return 6 * kind.elements
    if isinstance(kind, Elementwise):
        return kind.elements * kind.ops_per_element
    return 0


def bytes_of(op: Operator) -> OperandBytes:
    """Input, weight and output bytes touched by an operator."""
    kind = op.kind
    width = op.precision.bytes
    if isinstance(kind, Gemm):
        weight_copies = 1 if kind.weight_shared else kind.batch
        return OperandBytes(
            input=kind.batch * kind.M * kind.K * width,
            weight=weight_copies * kind.K * kind.N * width,
            output=kind.batch * kind.M * kind.N * width,
        )
    if isinstance(kind, Softmax):
        size = kind.rows * kind.cols * width
        return OperandBytes(input=size, weight=0, output=size)
    if isinstance(kind, LayerNorm):
        size = kind.rows * kind.cols * width
        return OperandBytes(input=size, weight=2 * kind.cols * width, output=size)
    if isinstance(kind, (Gelu, Elementwise)):
        size = kind.elements * width
        return OperandBytes(input=size, weight=0, output=size)
    if isinstance(kind, KvCacheUpdate):
        return OperandBytes(input=0, weight=0, output=kind.bytes)
    return OperandBytes(input=kind.bytes, weight=0, output=kind.bytes)
