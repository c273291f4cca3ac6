"""Collective timing used by the parallel execution model."""
from src.memory import InterconnectError, allreduce_cycles, allreduce_traffic, p2p_cycles

__all__ = ["InterconnectError", "allreduce_cycles", "allreduce_traffic", "p2p_cycles"]
