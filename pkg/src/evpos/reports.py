"""Deterministic JSON and CSV artifacts."""

from __future__ import annotations

import csv
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np
import pydantic

from .semigroups import GridFunction, LocalPositivityReport, TensorGrid
from .util import get_logger

logger = get_logger(name="evpos.reports")

SCHEMA = "evpos/1"

PathLike = Union[str, Path]


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy scalars and arrays, pydantic models, enums and tuples to plain JSON types.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, pydantic.BaseModel):
        return to_jsonable(value.model_dump(mode="python"))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(value, complex):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, Path):
        return value.as_posix()
    return value


def dumps(payload: dict) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: PathLike, payload: dict) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps(payload), encoding="utf-8")
    return out


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write rows with floats at 17 significant digits."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{x:.17g}" if isinstance(x, (float, np.floating)) else to_jsonable(x) for x in row])
    return out


def write_grid_function_csv(path: PathLike, u: GridFunction) -> Path:
    """Columns (x, value) in 1D, (x, y, value) on tensor grids."""
    if isinstance(u.grid, TensorGrid):
        X, Y = np.meshgrid(u.grid.x, u.grid.y, indexing="ij")
        rows = zip(X.ravel(), Y.ravel(), u.values.ravel())
        return write_csv(path, ("x", "y", "value"), rows)
    return write_csv(path, ("x", "value"), zip(u.grid.points, u.values))


def write_trace_csv(path: PathLike, report: LocalPositivityReport) -> Path:
    return write_csv(path, ("t", "min_over_window"), report.min_value_trace)
