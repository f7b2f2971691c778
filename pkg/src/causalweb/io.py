"""CSV ingestion and the JSON result format."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .certainty import ReferenceDensity
from .core import AnalysisSpec, Dataset, ProcessSeries, ValidationError
from .decomposition import DecompositionResult, MlinkTable, parse_subset_key, subset_key, subset_masks

__all__ = [
    "SCHEMA_VERSION",
    "read_csv",
    "write_csv",
    "result_to_dict",
    "result_from_dict",
    "dumps_result",
    "write_result",
    "read_result",
    "write_text",
]

SCHEMA_VERSION = 1


def read_csv(path) -> Dataset:
    """Read a header-plus-numbers CSV into a :class:`Dataset`, one series per column."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if any(not h for h in header):
        raise ValidationError(f"{path}: empty column name in header")
    seen = set()
    for col, name in enumerate(header, start=1):
        if name in seen:
            raise ValidationError(f"{path}: duplicate column {name!r} (column {col})")
        seen.add(name)
    body = [r for r in rows[1:] if r]  # tolerate a trailing blank line
    if not body:
        raise ValidationError(f"{path}: no data rows")
    data = np.empty((len(body), len(header)))
    for i, row in enumerate(body):
        line = i + 2
        if len(row) != len(header):
            raise ValidationError(
                f"{path}: row {line} has {len(row)} fields, expected {len(header)}")
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise ValidationError(
                    f"{path}: row {line}, column {j + 1} ({header[j]}): "
                    f"non-numeric value {cell!r}") from None
            if not math.isfinite(value):
                raise ValidationError(
                    f"{path}: row {line}, column {j + 1} ({header[j]}): "
                    f"non-finite value {cell!r}")
            data[i, j] = value
    return Dataset(tuple(ProcessSeries(name, data[:, j]) for j, name in enumerate(header)))


def write_csv(dataset: Dataset, path) -> None:
    """Write ``dataset`` with shortest round-tripping float formatting."""
    path = Path(path)
    columns = [s.values for s in dataset.series]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(dataset.names)
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])


def _spec_dict(result: DecompositionResult) -> dict:
    spec = result.spec.to_dict()
    spec["units"] = "nats"
    spec["seed"] = result.seed
    return spec


def result_to_dict(result: DecompositionResult) -> dict:
    labels = result.labels
    masks = subset_masks(result.n_drivers)
    return {
        "schema_version": SCHEMA_VERSION,
        "spec": _spec_dict(result),
        "n_rows": result.n_rows,
        "reference": result.reference.to_dict(),
        "raw_cmi": {subset_key(m, labels): result.mlinks.raw[m] for m in masks},
        "pure_mlinks": {subset_key(m, labels): result.mlinks.pure[m] for m in masks},
        "totals": dict(zip(labels, result.totals)),
        "I_full": result.i_full,
        "W_x": result.w_x,
        "W_total": result.w_total,
        "cs": dict(zip(labels, result.cs)),
        "cs_noise": result.cs_noise,
        "flags": list(result.flags),
        "diagnostics": result.diagnostics,
    }


def result_from_dict(data) -> DecompositionResult:
    if not isinstance(data, dict) or "schema_version" not in data:
        raise ValidationError("result document has no schema_version")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported schema_version {data['schema_version']!r} (expected {SCHEMA_VERSION})")
    try:
        spec = AnalysisSpec.from_dict(data["spec"])
        labels = spec.labels
        n = len(labels)
        raw = {parse_subset_key(k, labels): float(v) for k, v in data["raw_cmi"].items()}
        pure = {parse_subset_key(k, labels): float(v) for k, v in data["pure_mlinks"].items()}
        return DecompositionResult(
            spec=spec,
            mlinks=MlinkTable(n, raw, pure),
            totals=[float(data["totals"][label]) for label in labels],
            i_full=float(data["I_full"]),
            w_x=float(data["W_x"]),
            w_total=float(data["W_total"]),
            cs=[float(data["cs"][label]) for label in labels],
            cs_noise=float(data["cs_noise"]),
            reference=ReferenceDensity.from_dict(data["reference"]),
            n_rows=int(data["n_rows"]),
            seed=data["spec"].get("seed"),
            flags=list(data.get("flags", [])),
            diagnostics=dict(data.get("diagnostics") or {}),
        )
    except KeyError as exc:
        raise ValidationError(f"result document is missing field {exc.args[0]!r}") from None


def dumps_result(result: DecompositionResult) -> str:
    """Deterministic JSON text; floats use the shortest round-tripping repr."""
    return json.dumps(result_to_dict(result), indent=2, allow_nan=False) + "\n"


def write_text(text: str, path) -> None:
    Path(path).write_text(text, encoding="utf-8")


def write_result(result: DecompositionResult, path) -> None:
    write_text(dumps_result(result), path)


def read_result(path) -> DecompositionResult:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return result_from_dict(data)
