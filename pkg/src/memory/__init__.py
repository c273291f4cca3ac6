"""Memory hierarchy model: transfer timing, coalescing, load/compute overlap and ICI collectives."""
from .interconnect import InterconnectError, allreduce_cycles, allreduce_traffic, p2p_cycles
from .pipeline import PipelineError, PipelineSegment, chain, pipeline_overlap
from .transfer import Level, TransferError, TransferLeg, coalesced_bytes, transfer_cycles

__all__ = [
    "InterconnectError",
    "Level",
    "PipelineError",
    "PipelineSegment",
    "TransferError",
    "TransferLeg",
    "allreduce_cycles",
    "allreduce_traffic",
    "chain",
    "coalesced_bytes",
    "p2p_cycles",
    "pipeline_overlap",
    "transfer_cycles",
]
