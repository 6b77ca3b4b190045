"""CSV/JSON serialization of stability reports and CSV data ingestion."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .estimators import SortedSample
from .simharness import CellResult, StabilityConfig, StabilityReport

SUMMARY_HEADER = ["estimator", "model", "s", "tau", "min", "max", "diff", "mid", "failures"]


def fmt(x) -> str:
    """Locale-independent float text with 17 significant digits."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def curves_path(path: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_curves{ext or '.csv'}"


def _curve_columns(report: StabilityReport) -> list:
    single_model = len({c.model for c in report.cells}) == 1
    names = []
    for c in report.cells:
        names.append(f"rmse_{c.estimator}" if single_model else f"rmse_{c.estimator}@{c.family}")
    return names


def emit_report(report: StabilityReport, fmt_name: str, path: str) -> list:
    """Write the report; returns the list of files written."""
    if fmt_name == "json":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report.to_dict(), fh, indent=1, allow_nan=True)
            fh.write("\n")
        return [path]
    if fmt_name != "csv":
        raise ValueError(f"unknown report format {fmt_name!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for c in report.cells:
            w.writerow([c.estimator, c.model, fmt(c.s), fmt(c.tau), fmt(c.min), fmt(c.max),
                        fmt(c.diff), fmt(c.mid), c.failures])
    cpath = curves_path(path)
    with open(cpath, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "kv"] + _curve_columns(report))
        for i, k in enumerate(report.k_values):
            row = [i + 1, int(k)]
            for c in report.cells:
                row.append(fmt(c.rmse[i]) if c.rmse else "nan")
            w.writerow(row)
    return [path, cpath]


def read_report_json(path: str) -> StabilityReport:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    cells = [CellResult(**c) for c in data["cells"]]
    return StabilityReport(
        config=StabilityConfig(**data["config"]),
        k_values=data["k_values"],
        cells=cells,
        generator=data["generator"],
        metadata=data.get("metadata", {}),
    )


@dataclass(frozen=True)
class IngestResult:
    sample: SortedSample
    dropped: int
    header: bool


def _to_float(text: str):
    try:
        return float(text)
    except ValueError:
        return None


def ingest_csv(path: str, column=0) -> IngestResult:
    """Read one numeric column; a non-numeric first row is taken as a header.

    ``column`` is a 0-based index or a header name. Non-finite and unparsable
    entries after the header are dropped and counted.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    idx = column
    header = False
    first = rows[0]
    if isinstance(column, str) and not column.isdigit():
        names = [c.strip() for c in first]
        if column not in names:
            raise ValueError(f"{path}: no column named {column!r}")
        idx = names.index(column)
        header = True
    else:
        idx = int(column)
        if idx >= len(first):
            raise ValueError(f"{path}: column {idx} out of range")
        header = _to_float(first[idx].strip()) is None
    body = rows[1:] if header else rows
    values, dropped = [], 0
    for r in body:
        v = _to_float(r[idx].strip()) if idx < len(r) else None
        if v is None or not math.isfinite(v):
            dropped += 1
            continue
        values.append(v)
    if not values:
        raise ValueError(f"{path}: no finite numeric values in column {column!r}")
    return IngestResult(SortedSample(np.sort(np.array(values))), dropped, header)
