"""Sequential evaluation of layer graphs and per-category rollups."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from loguru import logger

from src.config import get_settings
from src.hardware import TpuConfig
from src.workload import GEMM_CATEGORIES, Category, LayerGraph, Operator

from .evaluate import LatencyEnergy
from .mapspace import Mapping
from .search import best_mapping


@dataclass(frozen=True)
class OperatorResult:
    name: str
    category: Category
    mapping: Mapping
    result: LatencyEnergy


@dataclass(frozen=True)
class LayerReport:
    """Per-operator costs of one graph in topological order, with totals."""

    name: str
    config: str
    operators: tuple[OperatorResult, ...]
    total: LatencyEnergy

    def __post_init__(self):
        if not self.operators:
            raise ValueError("a layer report needs at least one operator")

    def result(self, name: str) -> OperatorResult:
        for item in self.operators:
            if item.name == name:
                return item
        raise KeyError(name)

    def latency_of(self, *names: str) -> float:
        """Summed cycles of the named operators."""
        return sum(self.result(name).result.cycles for name in names)

    def by_category(self) -> dict[Category, LatencyEnergy]:
        rollup: dict[Category, LatencyEnergy] = {}
        for item in self.operators:
            rollup[item.category] = rollup.get(item.category, LatencyEnergy.zero()) + item.result
        return rollup

    def category_shares(self) -> dict[Category, float]:
        """Fraction of layer latency per category; sums to 1."""
        if self.total.cycles == 0:
            return {category: 0.0 for category in self.by_category()}
        return {category: cost.cycles / self.total.cycles for category, cost in self.by_category().items()}

    @property
    def gemm_share(self) -> float:
        shares = self.category_shares()
        return sum(shares.get(category, 0.0) for category in GEMM_CATEGORIES)

    def scaled(self, factor: int) -> LatencyEnergy:
        """Cost of ``factor`` identical layers run back to back."""
        return self.total.scaled(factor)


def evaluate_ops(ops: list[Operator], cfg: TpuConfig, threads: Optional[int] = None) -> list[OperatorResult]:
    """Best-map operators, optionally on a thread pool; output order follows ``ops``."""
    threads = threads or get_settings().threads

    def run(op: Operator) -> OperatorResult:
        mapping, result = best_mapping(op, cfg)
        return OperatorResult(op.name, op.category, mapping, result)

    if threads <= 1 or len(ops) <= 1:
        return [run(op) for op in ops]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, ops))


def evaluate_graph(graph: LayerGraph, cfg: TpuConfig, threads: Optional[int] = None) -> LayerReport:
    """Evaluate every operator with its best mapping, one after another.

    Operators never overlap, so layer latency is the exact sum of operator
    latencies in topological order.

    Raises:
        GraphError: If the graph has a dependency cycle.
        MappingError: If an operator cannot be mapped onto ``cfg``.
    """
    results = evaluate_ops(graph.topological_order(), cfg, threads)
    total = LatencyEnergy.zero()
    for item in results:
        total = total + item.result
    logger.debug("{} on {}: {} cycles over {} operators", graph.name, cfg.name, total.cycles, len(results))
    return LayerReport(name=graph.name, config=cfg.name, operators=tuple(results), total=total)
