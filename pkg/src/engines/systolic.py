"""Analytic cycle model of the weight-stationary digital systolic MXU."""
from dataclasses import dataclass
from math import ceil

from src.workload import Precision


@dataclass(frozen=True)
class GemmTile:
    """One (M x K) @ (K x N) tile issued to a single MXU."""

    M: int
    K: int
    N: int
    precision: Precision = Precision.INT8

    def __post_init__(self):
        for name in ("M", "K", "N"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    @property
    def macs(self) -> int:
        return self.M * self.K * self.N

    @property
    def flops(self) -> int:
        return 2 * self.macs


def systolic_folds(rows: int, cols: int, tile: GemmTile) -> int:
    """Weight tiles of R x C needed to cover K x N."""
    return ceil(tile.K / rows) * ceil(tile.N / cols)


def systolic_cycles(rows: int, cols: int, tile: GemmTile) -> int:
    """Cycles for a tile on an R x C weight-stationary array.

    Each fold pays a non-overlapped weight fill of R cycles, then streams M
    skewed input rows and drains: M + R + C - 2 cycles.
    """
    return systolic_folds(rows, cols, tile) * (rows + tile.M + rows + cols - 2)


def systolic_mac_slots(rows: int, cols: int, tile: GemmTile) -> int:
    """MAC slots the array clocks through, zero padding included."""
    return systolic_folds(rows, cols, tile) * rows * cols * tile.M


def systolic_utilization(rows: int, cols: int, tile: GemmTile) -> float:
    """Useful MACs over array capacity during the tile, in (0, 1]."""
    return tile.flops / (2 * rows * cols * systolic_cycles(rows, cols, tile))
