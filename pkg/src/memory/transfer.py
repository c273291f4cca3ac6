"""Transfer timing and DRAM burst coalescing for the HBM -> CMEM -> VMEM hierarchy."""
from dataclasses import dataclass
from enum import Enum
from math import ceil

# Guards ceil() against float noise on exact multiples
_EPSILON = 1e-9


class TransferError(Exception):
    """Error during transfer timing."""

    pass


class Level(str, Enum):
    HBM_CMEM = "hbm_cmem"
    CMEM_VMEM = "cmem_vmem"
    VMEM_COMPUTE = "vmem_compute"


@dataclass(frozen=True)
class TransferLeg:
    """Bytes moved over one link of the hierarchy."""

    level: Level
    bytes: int
    bandwidth: float  # bytes per cycle
    latency: int = 0

    def __post_init__(self):
        if self.bytes < 0:
            raise ValueError(f"bytes must be >= 0, got {self.bytes}")


def transfer_cycles(leg: TransferLeg) -> int:
    """Cycles to move ``leg.bytes``: ceil(bytes / bandwidth) plus a fixed latency.

    Raises:
        TransferError: If the leg has no bandwidth.
    """
    if leg.bandwidth <= 0:
        raise TransferError(f"{leg.level.value} leg has zero bandwidth")
    if leg.bytes == 0:
        return 0
    return ceil(leg.bytes / leg.bandwidth - _EPSILON) + leg.latency


def _round_up(value: int, multiple: int) -> int:
    return ceil(value / multiple) * multiple


def coalesced_bytes(rows: int, row_bytes: int, contiguous_row_bytes: int, burst: int = 64) -> int:
    """DRAM bytes actually transferred for a tile of ``rows`` x ``row_bytes``.

    A tile that spans whole rows of its matrix is one contiguous block. A strided
    tile pays a full burst for every partial burst in each row.

    Args:
        rows: Tile rows
        row_bytes: Bytes per tile row
        contiguous_row_bytes: Bytes per row of the full matrix
        burst: DRAM burst size in bytes
    """
    if row_bytes < 1:
        raise ValueError(f"row_bytes must be >= 1, got {row_bytes}")
    if row_bytes >= contiguous_row_bytes:
        return _round_up(rows * row_bytes, burst)
    return rows * max(_round_up(row_bytes, burst), row_bytes)
