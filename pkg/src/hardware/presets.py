"""Named hardware presets: the TPUv4i-style baseline and the CIM design grid."""
from src.search import resolve_alias, suggest_names

from .config import CimGrid, DigitalSystolic, TpuConfig

BASELINE_NAME = "tpuv4i-baseline"

# Array dimensions (grid_rows, grid_cols) and MXU counts of the CIM design grid
TABLE_V_DIMS = ((8, 8), (16, 8), (16, 16))
TABLE_V_COUNTS = (2, 4, 8)

PRESET_ALIASES = {
    "baseline": BASELINE_NAME,
    "tpuv4i": BASELINE_NAME,
    "digital": BASELINE_NAME,
    "cim": "cim-16x8-x4",
    "design a": "design-a",
    "design b": "design-b",
}


class UnknownPresetError(Exception):
    """Error during preset lookup."""

    def __init__(self, name: str, suggestions: list[str]):
        self.name = name
        self.suggestions = suggestions
        hint = f" Did you mean: {', '.join(suggestions)}?" if suggestions else ""
        super().__init__(f"Unknown preset '{name}'.{hint}")


def cim_preset_name(grid_rows: int, grid_cols: int, mxu_count: int) -> str:
    return f"cim-{grid_rows}x{grid_cols}-x{mxu_count}"


def _cim_config(name: str, grid_rows: int, grid_cols: int, mxu_count: int) -> TpuConfig:
    return TpuConfig(
        name=name,
        mxu_count=mxu_count,
        mxu=CimGrid(grid_rows=grid_rows, grid_cols=grid_cols),
    )


def _build_presets() -> dict[str, TpuConfig]:
    presets = {
        BASELINE_NAME: TpuConfig(
            name=BASELINE_NAME,
            mxu_count=4,
            mxu=DigitalSystolic(rows=128, cols=128),
        ),
    }
    for grid_rows, grid_cols in TABLE_V_DIMS:
        for count in TABLE_V_COUNTS:
            name = cim_preset_name(grid_rows, grid_cols, count)
            presets[name] = _cim_config(name, grid_rows, grid_cols, count)

    # Four 8x8 CIM-MXUs and eight 16x8 CIM-MXUs
    presets["design-a"] = _cim_config("design-a", 8, 8, 4)
    presets["design-b"] = _cim_config("design-b", 16, 8, 8)
    return presets


PRESETS: dict[str, TpuConfig] = _build_presets()


def preset_names() -> list[str]:
    """Preset names in stable registry order."""
    return list(PRESETS)


def table_v_names() -> list[str]:
    """Names of the nine CIM design points, array dimension major."""
    return [
        cim_preset_name(grid_rows, grid_cols, count)
        for grid_rows, grid_cols in TABLE_V_DIMS
        for count in TABLE_V_COUNTS
    ]


def builtin_preset(name: str) -> TpuConfig:
    """Look up a preset by name or alias.

    Raises:
        UnknownPresetError: If no preset matches; carries close-match suggestions.
    """
    if name in PRESETS:
        return PRESETS[name]

    target = resolve_alias(name, PRESET_ALIASES)
    if target is not None:
        return PRESETS[target]

    raise UnknownPresetError(name, suggest_names(name, PRESETS, aliases=PRESET_ALIASES))
