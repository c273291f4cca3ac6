"""Event-driven reference simulations of both MXU kinds, built on simpy.

These are slow and only meant for small shapes; they pin down the analytic
cycle models in ``systolic`` and ``cim``.
"""
from math import ceil

import simpy
from loguru import logger

from src.hardware import CimGrid
from src.workload import Precision

from .systolic import GemmTile, systolic_folds

SYSTOLIC_MAX_ARRAY = 32
CIM_MAX_GRID = 8
CIM_MAX_CORE = 8
ORACLE_MAX_DIM = 64


class OracleGuardError(Exception):
    """Error during oracle setup: the problem is too large to simulate."""

    pass


def _check_dims(tile: GemmTile):
    if max(tile.M, tile.K, tile.N) > ORACLE_MAX_DIM:
        raise OracleGuardError(f"oracle supports M, K, N <= {ORACLE_MAX_DIM}, got {tile}")


# --- Systolic array ---


class _SystolicFold:
    """One weight fold: R-cycle weight fill, then skewed streaming through R x C PEs."""

    def __init__(self, env: simpy.Environment, rows: int, cols: int, M: int):
        self.env = env
        self.rows = rows
        self.cols = cols
        self.M = M
        self.horizontal = [[simpy.Store(env) for _ in range(cols)] for _ in range(rows)]
        self.vertical = [[simpy.Store(env) for _ in range(cols)] for _ in range(rows)]
        self.drained = 0

    def weight_fill(self):
        # One weight row shifts into the array per cycle
        for _ in range(self.rows):
            yield self.env.timeout(1)

    def pe(self, i: int, j: int):
        for m in range(self.M):
            activation = yield self.horizontal[i][j].get()
            psum = yield self.vertical[i][j].get()
            yield self.env.timeout(1)
            if j + 1 < self.cols:
                self.horizontal[i][j + 1].put(activation)
            if i + 1 < self.rows:
                self.vertical[i + 1][j].put(psum + 1)
            else:
                self.drained += 1

    def run(self):
        yield self.env.process(self.weight_fill())
        for i in range(self.rows):
            for m in range(self.M):
                self.horizontal[i][0].put(m)
        for j in range(self.cols):
            for _ in range(self.M):
                self.vertical[0][j].put(0)
        pes = [self.env.process(self.pe(i, j)) for i in range(self.rows) for j in range(self.cols)]
        yield self.env.all_of(pes)


def systolic_oracle(rows: int, cols: int, tile: GemmTile) -> int:
    """Simulate a tile on an R x C weight-stationary array; returns exact cycles.

    Raises:
        OracleGuardError: If the array or the tile exceeds the oracle limits.
    """
    if max(rows, cols) > SYSTOLIC_MAX_ARRAY:
        raise OracleGuardError(f"systolic oracle supports arrays up to {SYSTOLIC_MAX_ARRAY}x{SYSTOLIC_MAX_ARRAY}")
    _check_dims(tile)

    env = simpy.Environment()
    folds = systolic_folds(rows, cols, tile)

    def driver():
        for index in range(folds):
            fold = _SystolicFold(env, rows, cols, tile.M)
            yield env.process(fold.run())
            logger.trace(f"(Cycle {env.now}) systolic fold {index} drained {fold.drained} outputs")

    env.run(env.process(driver()))
    return int(env.now)


# --- CIM grid ---


def _cim_fold_plan(grid: CimGrid, tile: GemmTile) -> list[tuple[int, list[int]]]:
    """(k, per-column output widths) for each fold, N blocks outer."""
    plan = []
    n_core = grid.outputs_per_core
    for n_start in range(0, tile.N, grid.n_capacity):
        n = min(grid.n_capacity, tile.N - n_start)
        widths = [min(n_core, n - c * n_core) for c in range(ceil(n / n_core))]
        for k_start in range(0, tile.K, grid.k_capacity):
            plan.append((min(grid.k_capacity, tile.K - k_start), widths))
    return plan


class _CimGridSim:
    """Per-column weight buses and two weight slots per core column, plus a
    compute controller that starts a fold once every column holds its weights."""

    def __init__(self, env: simpy.Environment, grid: CimGrid, tile: GemmTile):
        self.env = env
        self.grid = grid
        self.tile = tile
        self.plan = _cim_fold_plan(grid, tile)
        self.columns = max(len(widths) for _, widths in self.plan)
        self.buses = [simpy.Resource(env, capacity=1) for _ in range(self.columns)]
        self.slots = [simpy.Container(env, capacity=2, init=2) for _ in range(self.columns)]
        self.loaded = [[env.event() for _ in range(len(widths))] for _, widths in self.plan]

    def loader(self, column: int):
        for index, (k, widths) in enumerate(self.plan):
            if column >= len(widths):
                continue
            yield self.slots[column].get(1)
            with self.buses[column].request() as request:
                yield request
                remaining = ceil(k * widths[column] * self.grid.weight_bits / 8)
                while remaining > 0:
                    yield self.env.timeout(1)
                    remaining -= self.grid.weight_io_bytes_per_cycle
            logger.trace(f"(Cycle {self.env.now}) column {column} loaded fold {index}")
            self.loaded[index][column].succeed()

    def _forward(self, inbox: simpy.Store, vector: int):
        # Input vectors hop one grid column per cycle
        yield self.env.timeout(1)
        inbox.put(vector)

    def column(self, inboxes: list, column: int, per_vector: int):
        for _ in range(self.tile.M):
            vector = yield inboxes[column].get()
            if column + 1 < len(inboxes):
                self.env.process(self._forward(inboxes[column + 1], vector))
            yield self.env.timeout(per_vector)

    def controller(self):
        grid = self.grid
        for index, (_, widths) in enumerate(self.plan):
            yield self.env.all_of(self.loaded[index])
            if self.tile.precision is Precision.BF16:
                yield self.env.timeout(grid.fp_pre_cycles)

            # Columns advance in lockstep at the pace of the widest column
            per_vector = ceil(widths[0] / grid.active_outputs_per_wave) * grid.wave_cycles
            inboxes = [simpy.Store(self.env) for _ in widths]
            for vector in range(self.tile.M):
                inboxes[0].put(vector)
            yield self.env.all_of(
                [self.env.process(self.column(inboxes, c, per_vector)) for c in range(len(widths))]
            )

            if self.tile.precision is Precision.BF16:
                yield self.env.timeout(grid.fp_post_cycles)
            for column in range(len(widths)):
                yield self.slots[column].put(1)
            logger.trace(f"(Cycle {self.env.now}) fold {index} computed")


def cim_oracle(grid: CimGrid, tile: GemmTile) -> int:
    """Simulate a tile on the CIM grid; returns exact cycles.

    Raises:
        OracleGuardError: If the grid, core parameters or tile exceed the oracle limits.
    """
    if max(grid.grid_rows, grid.grid_cols) > CIM_MAX_GRID:
        raise OracleGuardError(f"CIM oracle supports grids up to {CIM_MAX_GRID}x{CIM_MAX_GRID}")
    core_params = (
        grid.core_inputs,
        grid.outputs_per_core,
        grid.wave_cycles,
        grid.active_outputs_per_wave,
    )
    if max(core_params) > CIM_MAX_CORE:
        raise OracleGuardError(f"CIM oracle supports core parameters up to {CIM_MAX_CORE}")
    _check_dims(tile)

    env = simpy.Environment()
    sim = _CimGridSim(env, grid, tile)
    for column in range(sim.columns):
        env.process(sim.loader(column))
    env.run(env.process(sim.controller()))
    return int(env.now)
