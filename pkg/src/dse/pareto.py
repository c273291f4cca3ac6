"""Pareto extraction, baseline normalization and table output for sweeps."""
import json
from pathlib import Path
from typing import Sequence, Union

import pandas as pd

from .sweep import SCHEMA_VERSION, SweepError

DEFAULT_AXES = ("latency_s", "mxu_energy_j")
RATIO_COLUMNS = ("latency_s", "mxu_energy_j", "total_energy_j", "area_proxy")
TABLE_FORMATS = ("csv", "json")


def pareto_front(table: pd.DataFrame, axes: Sequence[str] = DEFAULT_AXES) -> pd.DataFrame:
    """Non-dominated feasible rows (both axes minimized), in their original order.

    Rows are scanned by the first axis; a row survives if it strictly improves
    the best second-axis value seen so far.
    """
    first, second = axes
    feasible = table[table["feasible"].astype(bool)] if "feasible" in table else table
    ordered = feasible.sort_values([first, second], kind="mergesort")
    keep, best = [], float("inf")
    for index, row in ordered.iterrows():
        if row[second] < best:
            keep.append(index)
            best = row[second]
    return table.loc[sorted(keep, key=table.index.get_loc)]


def baseline_row(table: pd.DataFrame, name: str) -> pd.Series:
    """Row of the named config.

    Raises:
        SweepError: If the table has no such row or the row is infeasible.
    """
    matches = table[table["name"] == name]
    if matches.empty:
        raise SweepError(f"baseline '{name}' is not in the sweep table")
    row = matches.iloc[0]
    if "feasible" in row and not row["feasible"]:
        raise SweepError(f"baseline '{name}' is infeasible: {row['error']}")
    return row


def compare_to_baseline(table: pd.DataFrame, baseline: Union[str, pd.Series]) -> pd.DataFrame:
    """Add ``<metric>_ratio`` columns (row / baseline), chip-level and per MXU.

    Ratios below 1 are improvements. Per-MXU columns divide each side's MXU
    energy by its MXU count first.
    """
    base = baseline_row(table, baseline) if isinstance(baseline, str) else baseline
    result = table.copy()
    for column in RATIO_COLUMNS:
        result[f"{column}_ratio"] = table[column] / base[column]
    result["mxu_energy_per_mxu_j"] = table["mxu_energy_j"] / table["mxu_count"]
    result["mxu_energy_per_mxu_ratio"] = result["mxu_energy_per_mxu_j"] / (base["mxu_energy_j"] / base["mxu_count"])
    result["speedup"] = base["latency_s"] / table["latency_s"]
    result["mxu_energy_reduction"] = base["mxu_energy_j"] / table["mxu_energy_j"]
    return result


def write_table(table: pd.DataFrame, path: Union[str, Path], fmt: str = "csv") -> Path:
    """Write a sweep table as CSV or JSON.

    CSV carries the schema version as a column; JSON wraps the rows in a
    document with ``schema_version`` and ``columns``.

    Raises:
        SweepError: If the format is not csv or json.
    """
    if fmt not in TABLE_FORMATS:
        raise SweepError(f"Unknown table format '{fmt}' (expected csv or json)")
    path = Path(path)
    if fmt == "csv":
        table.assign(schema_version=SCHEMA_VERSION).to_csv(path, index=False)
    else:
        path.write_text(table_document(table))
    return path


def table_document(table: pd.DataFrame) -> str:
    """JSON text of a table with its schema header."""
    rows = json.loads(table.to_json(orient="records"))
    document = {"schema_version": SCHEMA_VERSION, "columns": list(table.columns), "rows": rows}
    return json.dumps(document, indent=2)
