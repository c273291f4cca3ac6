"""Analytic cycle model of the CIM-MXU.

The MXU is an output-stationary systolic grid of CIM cores. Each core holds a
K_core x N_core weight slice (``core_inputs`` x ``outputs_per_core``) and
processes one input vector bit-serially: every wave of ``wave_cycles`` cycles
drives ``active_outputs_per_wave`` output channels. Input vectors hop one grid
column per cycle. Weight slices for the next fold load over a per-column weight
bus while the current fold computes; cores keep two weight slots.
"""
from dataclasses import dataclass
from math import ceil

from src.hardware import CimGrid
from src.workload import Precision

from .systolic import GemmTile, systolic_cycles


@dataclass(frozen=True)
class CimFold:
    """Timing of one weight fold on the grid."""

    k: int
    n: int
    compute: int
    load: int
    mac_slots: int


def _fold_timing(grid: CimGrid, M: int, k: int, n: int, precision: Precision) -> CimFold:
    n_core = grid.outputs_per_core
    widest = min(n_core, n)
    cols_used = ceil(n / n_core)
    rows_used = ceil(k / grid.core_inputs)
    waves = ceil(widest / grid.active_outputs_per_wave)
    per_vector = waves * grid.wave_cycles

    compute = M * per_vector + (cols_used - 1)
    if precision is Precision.BF16:
        compute += grid.fp_pre_cycles + grid.fp_post_cycles

    # Columns load in parallel; the widest column (the first) bounds the fold
    weight_bytes = ceil(k * widest * grid.weight_bits / 8)
    load = ceil(weight_bytes / grid.weight_io_bytes_per_cycle)

    mac_slots = M * rows_used * grid.core_inputs * cols_used * waves * grid.active_outputs_per_wave
    return CimFold(k=k, n=n, compute=compute, load=load, mac_slots=mac_slots)


def cim_folds(grid: CimGrid, tile: GemmTile) -> list[CimFold]:
    """Folds in issue order: output-column blocks outer, K blocks inner."""
    k_cap, n_cap = grid.k_capacity, grid.n_capacity
    folds = []
    for n_start in range(0, tile.N, n_cap):
        n = min(n_cap, tile.N - n_start)
        for k_start in range(0, tile.K, k_cap):
            k = min(k_cap, tile.K - k_start)
            folds.append(_fold_timing(grid, tile.M, k, n, tile.precision))
    return folds


def cim_cycles(grid: CimGrid, tile: GemmTile) -> int:
    """Cycles for a tile on the CIM grid.

    The first fold's weights load up front; every later load overlaps the
    previous fold's compute, so each step costs max(compute, load).
    """
    folds = cim_folds(grid, tile)
    total = folds[0].load
    for previous, current in zip(folds, folds[1:]):
        total += max(previous.compute, current.load)
    return total + folds[-1].compute


def cim_mac_slots(grid: CimGrid, tile: GemmTile) -> int:
    """MAC slots clocked by the active cores, zero padding included."""
    return sum(fold.mac_slots for fold in cim_folds(grid, tile))


def cim_utilization(grid: CimGrid, tile: GemmTile) -> float:
    return tile.macs / (grid.peak_macs_per_cycle * cim_cycles(grid, tile))


def gemv_advantage(grid: CimGrid, rows: int, cols: int, tile: GemmTile) -> float:
    """Digital-array cycles over CIM-grid cycles for a GEMV-shaped tile.

    Raises:
        ValueError: If the tile is not a GEMV (M != 1).
    """
    if tile.M != 1:
        raise ValueError(f"gemv_advantage expects M = 1, got M = {tile.M}")
    return systolic_cycles(rows, cols, tile) / cim_cycles(grid, tile)
