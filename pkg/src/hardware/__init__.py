"""Hardware description: TPU config models, presets and config documents."""
from .config import (
    CIM_AREA_EFFICIENCY,
    DIGITAL_AREA_EFFICIENCY,
    GIB,
    KIB,
    MIB,
    CimGrid,
    ConfigError,
    DigitalSystolic,
    EnergyTable,
    MxuKind,
    TpuConfig,
    VpuConfig,
    area_proxy,
    parse_bytes,
    peak_macs_per_cycle,
    tops_per_area_proxy,
)
from .loader import load_config, parse_config, serialize_config
from .presets import (
    BASELINE_NAME,
    PRESETS,
    UnknownPresetError,
    builtin_preset,
    cim_preset_name,
    preset_names,
    table_v_names,
)

__all__ = [
    "BASELINE_NAME",
    "CIM_AREA_EFFICIENCY",
    "DIGITAL_AREA_EFFICIENCY",
    "GIB",
    "KIB",
    "MIB",
    "PRESETS",
    "CimGrid",
    "ConfigError",
    "DigitalSystolic",
    "EnergyTable",
    "MxuKind",
    "TpuConfig",
    "UnknownPresetError",
    "VpuConfig",
    "area_proxy",
    "builtin_preset",
    "cim_preset_name",
    "load_config",
    "parse_bytes",
    "parse_config",
    "peak_macs_per_cycle",
    "preset_names",
    "serialize_config",
    "table_v_names",
    "tops_per_area_proxy",
]
