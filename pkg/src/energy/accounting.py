"""Activity-based energy accounting from the EnergyTable."""
from dataclasses import dataclass, fields

from src.hardware import TpuConfig


@dataclass(frozen=True)
class Traffic:
    """Bytes moved per level of the hierarchy for one operator."""

    hbm: int = 0  # HBM <-> CMEM
    oci: int = 0  # CMEM <-> VMEM
    vmem: int = 0  # VMEM <-> MXU/VPU
    ici: float = 0  # chip-to-chip, per device

    def __add__(self, other: "Traffic") -> "Traffic":
        return Traffic(
            hbm=self.hbm + other.hbm,
            oci=self.oci + other.oci,
            vmem=self.vmem + other.vmem,
            ici=self.ici + other.ici,
        )

    def scaled(self, factor: int) -> "Traffic":
        return Traffic(
            hbm=self.hbm * factor,
            oci=self.oci * factor,
            vmem=self.vmem * factor,
            ici=self.ici * factor,
        )


@dataclass(frozen=True)
class EnergyBreakdown:
    """Joules per component."""

    mxu_j: float = 0.0
    vpu_j: float = 0.0
    vmem_j: float = 0.0
    cmem_j: float = 0.0
    hbm_j: float = 0.0
    ici_j: float = 0.0

    def __post_init__(self):
        for item in fields(self):
            if getattr(self, item.name) < 0:
                raise ValueError(f"{item.name} must be >= 0, got {getattr(self, item.name)}")

    @property
    def total(self) -> float:
        return self.mxu_j + self.vpu_j + self.vmem_j + self.cmem_j + self.hbm_j + self.ici_j

    def __add__(self, other: "EnergyBreakdown") -> "EnergyBreakdown":
        return EnergyBreakdown(
            **{item.name: getattr(self, item.name) + getattr(other, item.name) for item in fields(self)}
        )

    def scaled(self, factor: float) -> "EnergyBreakdown":
        return EnergyBreakdown(**{item.name: getattr(self, item.name) * factor for item in fields(self)})

    def as_dict(self) -> dict[str, float]:
        data = {item.name: getattr(self, item.name) for item in fields(self)}
        data["total_j"] = self.total
        return data


def sum_energy(breakdowns) -> EnergyBreakdown:
    total = EnergyBreakdown()
    for breakdown in breakdowns:
        total = total + breakdown
    return total


def op_energy(cfg: TpuConfig, traffic: Traffic, macs: int = 0, lane_ops: int = 0) -> EnergyBreakdown:
    """Energy of one operator.

    Args:
        cfg: Hardware config supplying the EnergyTable and MXU kind
        traffic: Bytes per hierarchy level, as produced by the mapper
        macs: MAC slots clocked by the MXU
        lane_ops: VPU lane-cycles

    CMEM is charged for data landing from HBM and for data leaving towards VMEM;
    VMEM likewise for data arriving over OCI and for operand reads by the engines.
    """
    table = cfg.energy
    return EnergyBreakdown(
        mxu_j=macs * cfg.mac_energy,
        vpu_j=lane_ops * table.vpu_op_energy,
        vmem_j=(traffic.oci + traffic.vmem) * table.vmem_energy,
        cmem_j=(traffic.hbm + traffic.oci) * table.cmem_energy,
        hbm_j=traffic.hbm * table.hbm_energy,
        ici_j=traffic.ici * table.ici_energy,
    )
