"""Hardware description models for CIM-based and baseline TPUs."""
import re
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

KIB = 1024
MIB = 1024**2
GIB = 1024**3

DEFAULT_FREQUENCY = 1.05e9
DEFAULT_OCI_BW = 1024e9
DEFAULT_BURST_BYTES = 64

# Table-level efficiency figures used for the area proxy (TOPS/mm^2)
DIGITAL_AREA_EFFICIENCY = 0.648
CIM_AREA_EFFICIENCY = 1.31

_SUFFIXES = {
    "": 1,
    "B": 1,
    "KB": 10**3,
    "MB": 10**6,
    "GB": 10**9,
    "TB": 10**12,
    "KIB": KIB,
    "MIB": MIB,
    "GIB": GIB,
    "TIB": 1024**4,
}
_QUANTITY_PATTERN = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*([A-Za-z]*)\s*(/s)?\s*$")


class ConfigError(Exception):
    """Error during hardware config parsing or validation."""

    pass


def parse_bytes(value) -> float:
    """Parse a byte quantity such as ``"16MiB"``, ``"614GB/s"`` or a plain number.

    KB/MB/GB are powers of 10, KiB/MiB/GiB powers of 2. A trailing ``/s`` is
    accepted so bandwidths read naturally.

    Raises:
        ValueError: If the string is not a recognised quantity.
    """
    if isinstance(value, bool):
        raise ValueError("byte quantity cannot be a boolean")
    if isinstance(value, (int, float)):
        return value

    match = _QUANTITY_PATTERN.match(str(value))
    if not match:
        raise ValueError(f"not a byte quantity: {value!r}")

    number, suffix, _ = match.groups()
    scale = _SUFFIXES.get(suffix.upper())
    if scale is None:
        raise ValueError(f"unknown byte suffix {suffix!r} in {value!r}")

    quantity = float(number) * scale
    return int(quantity) if quantity.is_integer() else quantity


class DigitalSystolic(BaseModel):
    """Weight-stationary digital systolic array."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["systolic"] = "systolic"
    rows: int = Field(default=128, ge=1)
    cols: int = Field(default=128, ge=1)

    @property
    def peak_macs_per_cycle(self) -> float:
        return float(self.rows * self.cols)

    @property
    def native_tile(self) -> tuple[int, int]:
        """(K, N) extent of one weight fold."""
        return self.rows, self.cols

    @property
    def label(self) -> str:
        return f"systolic {self.rows}x{self.cols}"


class CimGrid(BaseModel):
    """Output-stationary grid of weight-stationary bit-serial CIM cores."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["cim"] = "cim"
    grid_rows: int = Field(default=16, ge=1)
    grid_cols: int = Field(default=8, ge=1)
    core_inputs: int = Field(default=128, ge=1)
    core_weight_cols: int = Field(default=256, ge=1)
    weight_bits: int = Field(default=8, ge=1)
    wave_cycles: int = Field(default=8, ge=1)
    active_outputs_per_wave: int = Field(default=8, ge=1)
    input_bus_bits: int = Field(default=32, ge=1)
    weight_io_bytes_per_cycle: int = Field(default=64, ge=1)
    fp_pre_cycles: int = Field(default=2, ge=0)
    fp_post_cycles: int = Field(default=2, ge=0)

    @model_validator(mode="after")
    def _check_core_geometry(self):
        if self.active_outputs_per_wave * self.weight_bits > self.core_weight_cols:
            raise ValueError(
                "active_outputs_per_wave x weight_bits must not exceed core_weight_cols "
                f"({self.active_outputs_per_wave} x {self.weight_bits} > {self.core_weight_cols})"
            )
        return self

    @property
    def outputs_per_core(self) -> int:
        """Logical output channels stored per core (N_core)."""
        return self.core_weight_cols // self.weight_bits

    @property
    def k_capacity(self) -> int:
        return self.grid_rows * self.core_inputs

    @property
    def n_capacity(self) -> int:
        return self.grid_cols * self.outputs_per_core

    @property
    def cores(self) -> int:
        return self.grid_rows * self.grid_cols

    @property
    def core_peak_macs_per_cycle(self) -> float:
        return self.core_inputs * self.active_outputs_per_wave / self.wave_cycles

    @property
    def peak_macs_per_cycle(self) -> float:
        return self.cores * self.core_peak_macs_per_cycle

    @property
    def native_tile(self) -> tuple[int, int]:
        return self.k_capacity, self.n_capacity

    @property
    def label(self) -> str:
        return f"cim {self.grid_rows}x{self.grid_cols}"


MxuKind = Annotated[Union[DigitalSystolic, CimGrid], Field(discriminator="kind")]


class VpuConfig(BaseModel):
    """Vector unit width and per-chunk cycle costs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lanes: int = Field(default=8 * 128, ge=1)
    c_add: int = Field(default=1, ge=1)
    c_mul: int = Field(default=1, ge=1)
    c_cmp: int = Field(default=1, ge=1)
    c_exp: int = Field(default=4, ge=1)
    c_tanh: int = Field(default=4, ge=1)
    c_div: int = Field(default=4, ge=1)
    c_rsqrt: int = Field(default=4, ge=1)


class EnergyTable(BaseModel):
    """Per-event energies in joules."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # 2 OPs per MAC: 0.77 TOPS/W digital, 7.26 TOPS/W CIM
    mac_energy_digital: float = Field(default=2.597e-12, ge=0)
    mac_energy_cim: float = Field(default=0.2755e-12, ge=0)
    vpu_op_energy: float = Field(default=0.05e-12, ge=0)
    vmem_energy: float = Field(default=0.10e-12, ge=0)
    cmem_energy: float = Field(default=0.30e-12, ge=0)
    hbm_energy: float = Field(default=4.0e-12, ge=0)
    ici_energy: float = Field(default=10e-12, ge=0)

    def scaled(self, factor: float) -> "EnergyTable":
        """Return a table with every entry multiplied by ``factor``."""
        return EnergyTable(**{name: value * factor for name, value in self.model_dump().items()})


class TpuConfig(BaseModel):
    """Full hardware description of one TPU chip."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "custom"
    frequency: float = Field(default=DEFAULT_FREQUENCY, gt=0)
    mxu_count: int = Field(default=4, ge=1)
    mxu: MxuKind = Field(default_factory=DigitalSystolic)
    vpu: VpuConfig = Field(default_factory=VpuConfig)
    vmem_bytes: int = Field(default=16 * MIB, gt=0)
    cmem_bytes: int = Field(default=128 * MIB, gt=0)
    hbm_bytes: int = Field(default=8 * GIB, gt=0)
    hbm_bw: float = Field(default=614e9, gt=0)
    oci_bw: float = Field(default=DEFAULT_OCI_BW, gt=0)
    ici_links: int = Field(default=2, ge=0)
    ici_link_bw: float = Field(default=100e9, gt=0)
    burst_bytes: int = Field(default=DEFAULT_BURST_BYTES, ge=1)
    transfer_latency_cycles: int = Field(default=0, ge=0)
    energy: EnergyTable = Field(default_factory=EnergyTable)

    @field_validator(
        "vmem_bytes", "cmem_bytes", "hbm_bytes", "burst_bytes",
        "hbm_bw", "oci_bw", "ici_link_bw",
        mode="before",
    )
    @classmethod
    def _parse_quantity(cls, value):
        return parse_bytes(value)

    @model_validator(mode="after")
    def _check_hierarchy(self):
        if not self.vmem_bytes < self.cmem_bytes < self.hbm_bytes:
            raise ValueError(
                "memory levels must satisfy vmem_bytes < cmem_bytes < hbm_bytes "
                f"(got {self.vmem_bytes}, {self.cmem_bytes}, {self.hbm_bytes})"
            )
        return self

    # --- Derived quantities ---

    @property
    def is_cim(self) -> bool:
        return isinstance(self.mxu, CimGrid)

    @property
    def peak_macs_per_cycle(self) -> float:
        return self.mxu.peak_macs_per_cycle * self.mxu_count

    @property
    def peak_ops_per_second(self) -> float:
        return 2 * self.peak_macs_per_cycle * self.frequency

    @property
    def mac_energy(self) -> float:
        return self.energy.mac_energy_cim if self.is_cim else self.energy.mac_energy_digital

    @property
    def hbm_bytes_per_cycle(self) -> float:
        return self.hbm_bw / self.frequency

    @property
    def oci_bytes_per_cycle(self) -> float:
        return self.oci_bw / self.frequency

    @property
    def ici_bytes_per_cycle(self) -> float:
        return self.ici_link_bw / self.frequency

    @property
    def assumptions(self) -> list[str]:
        """Modeled values that are assumptions rather than published figures."""
        notes = []
        if self.oci_bw == DEFAULT_OCI_BW:
            notes.append("oci_bw uses the assumed default of 1024 GB/s")
        if self.burst_bytes == DEFAULT_BURST_BYTES:
            notes.append("DRAM burst for coalescing uses the assumed default of 64 B")
        if self.vpu == VpuConfig():
            notes.append("VPU per-op cycle costs are assumed defaults")
        defaults = EnergyTable()
        if (self.energy.vmem_energy, self.energy.cmem_energy, self.energy.hbm_energy,
                self.energy.ici_energy, self.energy.vpu_op_energy) == (
                defaults.vmem_energy, defaults.cmem_energy, defaults.hbm_energy,
                defaults.ici_energy, defaults.vpu_op_energy):
            notes.append("memory, interconnect and VPU energies are placeholder defaults")
        return notes


def peak_macs_per_cycle(cfg: TpuConfig) -> tuple[float, float]:
    """Return (per-MXU, total) peak MACs per cycle."""
    return cfg.mxu.peak_macs_per_cycle, cfg.peak_macs_per_cycle


def area_proxy(cfg: TpuConfig) -> float:
    """MXU area in digital-MAC-equivalent units.

    Digital arrays count one unit per MAC. CIM grids count their peak MACs per
    cycle divided by the CIM area-efficiency advantage.
    """
    if cfg.is_cim:
        advantage = CIM_AREA_EFFICIENCY / DIGITAL_AREA_EFFICIENCY
        return cfg.peak_macs_per_cycle / advantage
    return cfg.peak_macs_per_cycle


def tops_per_area_proxy(cfg: TpuConfig) -> float:
    """Peak TOPS per area-proxy unit."""
    return cfg.peak_ops_per_second / 1e12 / area_proxy(cfg)
