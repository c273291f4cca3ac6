"""Reading and writing hardware config documents.

A config document is a JSON object with up to five sections::

    {
      "preset": "tpuv4i-baseline",
      "hardware": {"name": ..., "frequency": ..., "mxu_count": ..., "ici_links": ..., "ici_link_bw": ...},
      "mxu": {"kind": "systolic" | "cim", ...},
      "vpu": {"lanes": ..., "c_add": ..., ...},
      "memory": {"vmem_bytes": "16MiB", "hbm_bw": "614GB/s", ...},
      "energy": {"mac_energy_digital": ..., ...}
    }

When ``preset`` is present the remaining sections are merged over that preset.
"""
import json
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from .config import ConfigError, TpuConfig
from .presets import builtin_preset

HARDWARE_KEYS = ("name", "frequency", "mxu_count", "ici_links", "ici_link_bw")
MEMORY_KEYS = (
    "vmem_bytes",
    "cmem_bytes",
    "hbm_bytes",
    "hbm_bw",
    "oci_bw",
    "burst_bytes",
    "transfer_latency_cycles",
)
NESTED_SECTIONS = ("mxu", "vpu", "energy")
TOP_LEVEL_KEYS = ("preset", "hardware", "memory") + NESTED_SECTIONS


def _describe_validation_error(error: ValidationError) -> str:
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or "config"
    if first["type"] == "extra_forbidden":
        return f"unknown key '{field}'"
    return f"invalid value for '{field}': {first['msg']}"


def _section(doc: dict, key: str) -> dict:
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"Section '{key}' must be an object, got {type(value).__name__}")
    return value


def parse_config(text: str) -> TpuConfig:
    """Parse a JSON config document into a validated TpuConfig.

    Args:
        text: JSON document text

    Returns:
        Fully populated, immutable TpuConfig

    Raises:
        ConfigError: On JSON syntax errors (with line/column), unknown keys,
            unknown presets or invariant violations.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e

    if not isinstance(doc, dict):
        raise ConfigError("Config document must be a JSON object")

    for key in doc:
        if key not in TOP_LEVEL_KEYS:
            raise ConfigError(f"unknown key '{key}' (expected one of {', '.join(TOP_LEVEL_KEYS)})")

    flat: dict = {}
    if "preset" in doc:
        try:
            flat = builtin_preset(doc["preset"]).model_dump()
        except Exception as e:
            raise ConfigError(f"Failed to resolve preset: {e}") from e

    for section, allowed in (("hardware", HARDWARE_KEYS), ("memory", MEMORY_KEYS)):
        for key, value in _section(doc, section).items():
            if key not in allowed:
                raise ConfigError(f"unknown key '{section}.{key}'")
            flat[key] = value

    for section in NESTED_SECTIONS:
        overrides = _section(doc, section)
        if not overrides:
            continue
        base = flat.get(section, {})
        # Switching MXU kind discards the preset's MXU fields
        if section == "mxu" and base.get("kind") != overrides.get("kind", base.get("kind")):
            base = {}
        flat[section] = {**base, **overrides}

    try:
        return TpuConfig.model_validate(flat)
    except ValidationError as e:
        raise ConfigError(f"Invalid config: {_describe_validation_error(e)}") from e


def serialize_config(cfg: TpuConfig) -> str:
    """Serialize a config to a sectioned JSON document that parse_config reads back."""
    dump = cfg.model_dump()
    doc = {
        "hardware": {key: dump[key] for key in HARDWARE_KEYS},
        "mxu": dump["mxu"],
        "vpu": dump["vpu"],
        "memory": {key: dump[key] for key in MEMORY_KEYS},
        "energy": dump["energy"],
    }
    return json.dumps(doc, indent=2)


def load_config(source: Union[str, Path]) -> TpuConfig:
    """Load a config from a file path, or fall back to a preset name.

    Raises:
        ConfigError: If the file cannot be read or parsed.
        UnknownPresetError: If ``source`` is neither a file nor a preset.
    """
    path = Path(source)
    if path.suffix == ".json" or path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Failed to read config file {path}: {e}") from e
        return parse_config(text)
    return builtin_preset(str(source))
