"""Layer graphs: operators plus dependency edges."""
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .operators import GEMM_CATEGORIES, Operator, flops_of


class GraphError(Exception):
    """Error during layer graph construction or ordering."""

    pass


@dataclass(frozen=True)
class LayerGraph:
    """Immutable DAG of operators forming one transformer layer or DiT block."""

    name: str
    ops: tuple[Operator, ...]
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise GraphError(f"Duplicate operator names in graph '{self.name}'")
        known = set(names)
        for op in self.ops:
            missing = [dep for dep in op.deps if dep not in known]
            if missing:
                raise GraphError(f"Operator '{op.name}' depends on unknown operators: {missing}")

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def op(self, name: str) -> Operator:
        for op in self.ops:
            if op.name == name:
                return op
        raise KeyError(name)

    def find(self, name: str) -> Optional[Operator]:
        return next((op for op in self.ops if op.name == name), None)

    def topological_order(self) -> list[Operator]:
        """Kahn's algorithm; ties resolve in insertion order.

        Raises:
            GraphError: If the dependency edges contain a cycle.
        """
        remaining = {op.name: set(op.deps) for op in self.ops}
        ordered: list[Operator] = []
        while remaining:
            ready = [op for op in self.ops if op.name in remaining and not remaining[op.name]]
            if not ready:
                raise GraphError(f"Graph '{self.name}' contains a dependency cycle among {sorted(remaining)}")
            for op in ready:
                ordered.append(op)
                del remaining[op.name]
            for deps in remaining.values():
                deps.difference_update(op.name for op in ready)
        return ordered

    def total_flops(self) -> int:
        return sum(flops_of(op) for op in self.ops)

    def gemm_flops(self) -> int:
        return sum(flops_of(op) for op in self.ops if op.is_gemm)

    def replace_ops(self, ops: Iterable[Operator], name: Optional[str] = None) -> "LayerGraph":
        return LayerGraph(name=name or self.name, ops=tuple(ops), meta=dict(self.meta))

    def ops_in(self, *categories) -> list[Operator]:
        wanted = set(categories) or set(GEMM_CATEGORIES)
        return [op for op in self.ops if op.category in wanted]
