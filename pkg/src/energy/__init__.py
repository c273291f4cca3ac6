"""Energy accounting per operator and per component."""
from .accounting import EnergyBreakdown, Traffic, op_energy, sum_energy
from .comparison import mxu_energy, mxu_energy_ratio

__all__ = ["EnergyBreakdown", "Traffic", "mxu_energy", "mxu_energy_ratio", "op_energy", "sum_energy"]
