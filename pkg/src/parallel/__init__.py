"""Multi-device execution: tensor/pipeline parallel plans and end-to-end inference."""
from .collectives import InterconnectError, allreduce_cycles, allreduce_traffic, p2p_cycles
from .end_to_end import (
    CapacityError,
    EndToEndReport,
    PhaseCost,
    check_kv_capacity,
    decode_positions,
    dit_end_to_end,
    kv_cache_bytes,
    llm_end_to_end,
    pipeline_latency,
)
from .plan import NAMED_PLANS, ParallelismError, ParallelismPlan, plan_by_name, plans_for_devices
from .sharding import shard_graph

__all__ = [
    "NAMED_PLANS",
    "CapacityError",
    "EndToEndReport",
    "InterconnectError",
    "ParallelismError",
    "ParallelismPlan",
    "PhaseCost",
    "allreduce_cycles",
    "allreduce_traffic",
    "check_kv_capacity",
    "decode_positions",
    "dit_end_to_end",
    "kv_cache_bytes",
    "llm_end_to_end",
    "p2p_cycles",
    "pipeline_latency",
    "plan_by_name",
    "plans_for_devices",
    "shard_graph",
]
