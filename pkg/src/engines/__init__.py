"""Compute engine models: digital systolic MXU, CIM-MXU, VPU and their oracles."""
from .cim import CimFold, cim_cycles, cim_folds, cim_mac_slots, cim_utilization, gemv_advantage
from .oracle import OracleGuardError, cim_oracle, systolic_oracle
from .systolic import (
    GemmTile,
    systolic_cycles,
    systolic_folds,
    systolic_mac_slots,
    systolic_utilization,
)
from .vpu import elementwise_cycles, gelu_cycles, layernorm_cycles, softmax_cycles

__all__ = [
    "CimFold",
    "GemmTile",
    "OracleGuardError",
    "cim_cycles",
    "cim_folds",
    "cim_mac_slots",
    "cim_oracle",
    "cim_utilization",
    "elementwise_cycles",
    "gelu_cycles",
    "gemv_advantage",
    "layernorm_cycles",
    "softmax_cycles",
    "systolic_cycles",
    "systolic_folds",
    "systolic_mac_slots",
    "systolic_oracle",
    "systolic_utilization",
]
