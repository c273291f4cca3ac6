"""Mapspace of two-level tilings (HBM -> CMEM -> VMEM) for operators.

A mapping tiles a GEMM once for CMEM and again, inside each CMEM tile, for VMEM.
Candidate tile sizes per dimension are powers of two, the full dimension, and
small multiples of the engine's native tile. Vector operators tile rows only.
"""
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Optional

from src.hardware import TpuConfig
from src.workload import Elementwise, Gelu, Gemm, LayerNorm, Operator, Precision, Softmax

# Above this many (cmem, vmem) pairs only maximal tiles are searched
FULL_SEARCH_LIMIT = 2000
NATIVE_MULTIPLES = 4
# Divisor mapspace guard for brute force
BRUTE_FORCE_MAX_DIM = 256


class MappingError(Exception):
    """Error during operator mapping."""

    pass


class Engine(str, Enum):
    MXU = "mxu"
    VPU = "vpu"
    DMA = "dma"
    ICI = "ici"


@dataclass(frozen=True, order=True)
class Tile:
    """GEMM tile extents. Vector mappings use M for rows and K for row length."""

    M: int
    K: int
    N: int

    def __post_init__(self):
        for name in ("M", "K", "N"):
            if getattr(self, name) < 1:
                raise ValueError(f"tile {name} must be >= 1, got {getattr(self, name)}")

    def working_set(self, width: int) -> int:
        """Bytes of the A, B and output tiles."""
        return (self.M * self.K + self.K * self.N + self.M * self.N) * width

    def fits_within(self, other: "Tile") -> bool:
        return self.M <= other.M and self.K <= other.K and self.N <= other.N

    def clipped(self, bound: "Tile") -> "Tile":
        return Tile(min(self.M, bound.M), min(self.K, bound.K), min(self.N, bound.N))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.M, self.K, self.N)


@dataclass(frozen=True)
class Mapping:
    """Tile sizes at CMEM and VMEM, double-buffering flags and the engine used."""

    cmem_tile: Tile
    vmem_tile: Tile
    double_buffer_cmem: bool = True
    double_buffer_vmem: bool = True
    engine: Engine = Engine.MXU

    def __post_init__(self):
        if not self.vmem_tile.fits_within(self.cmem_tile):
            raise MappingError(
                f"vmem tile {self.vmem_tile.as_tuple()} exceeds cmem tile {self.cmem_tile.as_tuple()}"
            )

    @property
    def sort_key(self) -> tuple:
        # Double buffering first among otherwise equal mappings
        return (
            self.cmem_tile.as_tuple(),
            self.vmem_tile.as_tuple(),
            not self.double_buffer_cmem,
            not self.double_buffer_vmem,
        )

    def describe(self) -> dict:
        return {
            "engine": self.engine.value,
            "cmem_tile": list(self.cmem_tile.as_tuple()),
            "vmem_tile": list(self.vmem_tile.as_tuple()),
            "double_buffer_cmem": self.double_buffer_cmem,
            "double_buffer_vmem": self.double_buffer_vmem,
        }


@dataclass(frozen=True)
class GemmProblem:
    """A GEMM as the mapper sees it.

    Weight-shared batches fold into M; otherwise every batch element streams its
    own weights and is tiled independently.
    """

    batch: int
    M: int
    K: int
    N: int
    precision: Precision

    @classmethod
    def of(cls, op: Operator) -> "GemmProblem":
        kind = op.kind
        if not isinstance(kind, Gemm):
            raise MappingError(f"operator {op.name!r} is not a GEMM")
        if kind.weight_shared:
            return cls(1, kind.batch * kind.M, kind.K, kind.N, op.precision)
        return cls(kind.batch, kind.M, kind.K, kind.N, op.precision)

    @property
    def dims(self) -> Tile:
        return Tile(self.M, self.K, self.N)

    @property
    def width(self) -> int:
        return self.precision.bytes


@dataclass(frozen=True)
class VectorProblem:
    """A vector operator as rows x row length.

    Softmax and layernorm rows are reductions and keep their length. Flat
    operators (GeLU, elementwise) are cut into rows of ``cols`` elements, at most
    one lane-width each; ``elements`` is their flat size.
    """

    rows: int
    cols: int
    precision: Precision
    weight_bytes: int = 0
    elements: int = 0

    @classmethod
    def of(cls, op: Operator, lanes: int, cols: Optional[int] = None) -> "VectorProblem":
        kind = op.kind
        width = op.precision.bytes
        if isinstance(kind, (Softmax, LayerNorm)):
            weight = 2 * kind.cols * width if isinstance(kind, LayerNorm) else 0
            return cls(kind.rows, kind.cols, op.precision, weight)
        if isinstance(kind, (Gelu, Elementwise)):
            cols = min(kind.elements, cols or lanes)
            return cls(-(-kind.elements // cols), cols, op.precision, elements=kind.elements)
        raise MappingError(f"operator {op.name!r} is not a vector operator")

    @property
    def row_bytes(self) -> int:
        return self.cols * self.precision.bytes

    @property
    def splittable(self) -> bool:
        return self.elements > 0


def usable_capacity(capacity: int, double_buffered: bool) -> int:
    return capacity // 2 if double_buffered else capacity


def native_dims(cfg: TpuConfig) -> Tile:
    """Engine-native (M, K, N) granularity; M streams so it has none."""
    k, n = cfg.mxu.native_tile
    return Tile(1, k, n)


def tile_candidates(dim: int, native: int) -> list[int]:
    """Powers of two up to dim, dim itself and the first few native multiples."""
    values = {dim}
    power = 1
    while power <= dim:
        values.add(power)
        power *= 2
    for multiple in range(1, NATIVE_MULTIPLES + 1):
        if native * multiple <= dim:
            values.add(native * multiple)
    return sorted(values)


def divisors(dim: int) -> list[int]:
    return [value for value in range(1, dim + 1) if dim % value == 0]


def feasible_tiles(axes: tuple[list[int], list[int], list[int]], capacity: int, width: int) -> list[Tile]:
    return [
        Tile(m, k, n)
        for m, k, n in product(*axes)
        if (m * k + k * n + m * n) * width <= capacity
    ]


def maximal_tiles(tiles: list[Tile], axes: tuple[list[int], list[int], list[int]]) -> list[Tile]:
    """Tiles that cannot grow to the next candidate along any single dimension."""
    present = {tile.as_tuple() for tile in tiles}
    following = [
        {value: (values[i + 1] if i + 1 < len(values) else None) for i, value in enumerate(values)}
        for values in axes
    ]
    result = []
    for tile in tiles:
        dims = tile.as_tuple()
        grows = False
        for axis in range(3):
            bigger = following[axis][dims[axis]]
            if bigger is None:
                continue
            grown = list(dims)
            grown[axis] = bigger
            if tuple(grown) in present:
                grows = True
                break
        if not grows:
            result.append(tile)
    return result


def _level_axes(problem: GemmProblem, cfg: TpuConfig) -> tuple[list[int], list[int], list[int]]:
    native = native_dims(cfg)
    return (
        tile_candidates(problem.M, native.M),
        tile_candidates(problem.K, native.K),
        tile_candidates(problem.N, native.N),
    )


def contained_pairs(cmem_tiles: list[Tile], vmem_tiles: list[Tile]) -> list[tuple[Tile, Tile]]:
    return [(c, v) for c in cmem_tiles for v in vmem_tiles if v.fits_within(c)]


@dataclass(frozen=True)
class Mapspace:
    """Candidate tiles for one GEMM.

    ``exhaustive`` spaces list every (cmem, vmem) pair; pruned spaces keep only
    maximal tiles per level and leave the pairing to the search.
    """

    cmem_tiles: tuple[Tile, ...]
    vmem_tiles: tuple[Tile, ...]
    exhaustive: bool
    double_buffered: bool = True

    def pairs(self) -> list[tuple[Tile, Tile]]:
        if self.exhaustive:
            return contained_pairs(list(self.cmem_tiles), list(self.vmem_tiles))
        pairs = set()
        for cmem in self.cmem_tiles:
            for vmem in self.vmem_tiles:
                pairs.add((cmem, vmem.clipped(cmem)))
        return sorted(pairs)

    def mappings(self) -> list[Mapping]:
        return [
            Mapping(cmem, vmem, self.double_buffered, self.double_buffered)
            for cmem, vmem in self.pairs()
        ]


def gemm_mapspace(op: Operator, cfg: TpuConfig, double_buffered: bool = True) -> Mapspace:
    """Feasible tiles of a GEMM at both levels.

    Raises:
        MappingError: If no tile fits, i.e. even a 1x1x1 tile exceeds a level.
    """
    problem = GemmProblem.of(op)
    axes = _level_axes(problem, cfg)
    cmem = feasible_tiles(axes, usable_capacity(cfg.cmem_bytes, double_buffered), problem.width)
    vmem = feasible_tiles(axes, usable_capacity(cfg.vmem_bytes, double_buffered), problem.width)
    if not cmem or not vmem:
        raise MappingError(f"no feasible tiling for {op.name!r} on {cfg.name}")

    small = len(cmem) * len(vmem) <= 50 * FULL_SEARCH_LIMIT
    if small and len(contained_pairs(cmem, vmem)) <= FULL_SEARCH_LIMIT:
        return Mapspace(tuple(cmem), tuple(vmem), exhaustive=True, double_buffered=double_buffered)

    native = native_dims(cfg)
    floor = Tile(1, min(problem.K, native.K), min(problem.N, native.N))
    vmem_max = [
        tile for tile in maximal_tiles(vmem, axes)
        if tile.K >= floor.K and tile.N >= floor.N
    ] or maximal_tiles(vmem, axes)
    return Mapspace(
        tuple(maximal_tiles(cmem, axes)),
        tuple(vmem_max),
        exhaustive=False,
        double_buffered=double_buffered,
    )


BUFFERING = (True, False)


def gemm_mapspaces(op: Operator, cfg: TpuConfig) -> list[Mapspace]:
    """Double-buffered and single-buffered mapspaces of a GEMM.

    Single buffering gets the whole capacity of each level but serializes loads
    with compute.

    Raises:
        MappingError: If no tile fits under either schedule.
    """
    spaces = []
    for double_buffered in BUFFERING:
        try:
            spaces.append(gemm_mapspace(op, cfg, double_buffered))
        except MappingError:
            continue
    if not spaces:
        raise MappingError(f"no feasible tiling for {op.name!r} on {cfg.name}")
    return spaces


def enumerate_mappings(op: Operator, cfg: TpuConfig) -> list[Mapping]:
    """Pruned, feasible mappings of a GEMM (every vmem tile inside its cmem tile), both schedules."""
    return [mapping for space in gemm_mapspaces(op, cfg) for mapping in space.mappings()]


def divisor_mappings(op: Operator, cfg: TpuConfig) -> list[Mapping]:
    """Every divisor tiling of a GEMM under both schedules, for exhaustive comparison on small operators.

    Raises:
        MappingError: If a dimension exceeds the brute-force guard or nothing fits.
    """
    problem = GemmProblem.of(op)
    largest = max(problem.dims.as_tuple())
    if largest > BRUTE_FORCE_MAX_DIM:
        raise MappingError(f"brute force is limited to dims <= {BRUTE_FORCE_MAX_DIM}, got {largest}")
    axes = (divisors(problem.M), divisors(problem.K), divisors(problem.N))
    mappings = []
    for double_buffered in BUFFERING:
        cmem = feasible_tiles(axes, usable_capacity(cfg.cmem_bytes, double_buffered), problem.width)
        vmem = feasible_tiles(axes, usable_capacity(cfg.vmem_bytes, double_buffered), problem.width)
        mappings.extend(
            Mapping(c, v, double_buffered, double_buffered) for c, v in contained_pairs(cmem, vmem)
        )
    if not mappings:
        raise MappingError(f"no feasible divisor tiling for {op.name!r} on {cfg.name}")
    return mappings


def vector_mapping(op: Operator, cfg: TpuConfig, lanes: Optional[int] = None) -> Mapping:
    """Row tiling of a vector operator: as many rows as fit half of VMEM and of CMEM.

    Flat operators whose lane-wide row does not fit are cut into shorter rows.

    Raises:
        MappingError: If a single row (input plus output) does not fit VMEM.
    """
    lanes = lanes or cfg.vpu.lanes
    problem = VectorProblem.of(op, lanes)
    vmem_budget = usable_capacity(cfg.vmem_bytes, True) - problem.weight_bytes
    if problem.splittable and 2 * problem.row_bytes > vmem_budget:
        cols = vmem_budget // (2 * problem.precision.bytes)
        if cols >= 1:
            problem = VectorProblem.of(op, lanes, cols)
    per_row = 2 * problem.row_bytes
    vmem_rows = vmem_budget // per_row
    cmem_rows = (usable_capacity(cfg.cmem_bytes, True) - problem.weight_bytes) // per_row
    if vmem_rows < 1:
        raise MappingError(f"a row of {op.name!r} ({problem.cols} elements) does not fit VMEM")
    vmem_rows = min(vmem_rows, problem.rows)
    cmem_rows = min(max(cmem_rows // vmem_rows, 1) * vmem_rows, problem.rows)
    return Mapping(
        Tile(cmem_rows, problem.cols, 1),
        Tile(vmem_rows, problem.cols, 1),
        engine=Engine.VPU,
    )
