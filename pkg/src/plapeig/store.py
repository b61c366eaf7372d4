"""CSV / JSON persistence and grid-string parsing."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidParameter, MissingEigenResult
from .model import EigenResult, GridFunction, ProblemParams

__all__ = [
    "fmt",
    "parse_grid",
    "result_to_dict",
    "result_from_dict",
    "load_result",
    "CsvTable",
    "dump_json",
]


def fmt(x) -> str:
    """17 significant digits: round-trip exact for doubles."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:count`` with an optional ``:log`` suffix."""
    parts = spec.split(":")
    log = False
    if len(parts) == 4:
        if parts[3] not in ("log", "lin"):
            raise InvalidParameter(f"grid suffix must be 'log' or 'lin', got {parts[3]!r}")
        log = parts[3] == "log"
        parts = parts[:3]
    if len(parts) != 3:
        raise InvalidParameter(f"grid string must be start:stop:count[:log], got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InvalidParameter(f"malformed grid string {spec!r}") from exc
    if count < 1:
        raise InvalidParameter("grid count must be >= 1")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise InvalidParameter("grid bounds must be finite")
    if log:
        if not (start > 0 and stop > 0):
            raise InvalidParameter("log grids need positive bounds")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _json_safe(d: dict) -> dict:
    return {k: v for k, v in d.items() if isinstance(v, (str, int, float, bool)) and
            not (isinstance(v, float) and not math.isfinite(v))}


def result_to_dict(res: EigenResult) -> dict:
    p = res.params
    return {
        "p": p.p,
        "k": p.k,
        "lambda": p.lam,
        "w": p.w,
        "node_index": res.node_index,
        "weak_residual": res.weak_residual,
        "positive": res.positive,
        "n_cells": res.u.n_cells,
        "values": [float(v) for v in res.u.values],
        "diagnostics": _json_safe(res.diagnostics),
    }


def result_from_dict(d: dict) -> EigenResult:
    try:
        params = ProblemParams(float(d["p"]), float(d["k"]), float(d["lambda"]), float(d["w"]))
        u = GridFunction(int(d["n_cells"]), np.asarray(d["values"], dtype=float))
        return EigenResult(params, u, int(d["node_index"]), float(d["weak_residual"]),
                           bool(d["positive"]), dict(d.get("diagnostics", {})))
    except (KeyError, TypeError) as exc:
        raise MissingEigenResult(f"not an eigen-result record: {exc}") from exc


def load_result(path: str | Path) -> EigenResult:
    path = Path(path)
    if not path.is_file():
        raise MissingEigenResult(f"no eigen-result file at {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MissingEigenResult(f"{path} is not valid JSON: {exc}") from exc
    return result_from_dict(data)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


class CsvTable:
    """Rows plus trailing ``# ...`` comment lines, rendered RFC-4180 style."""

    def __init__(self, header: list[str]):
        self.header = header
        self.rows: list[list] = []
        self.comments: list[str] = []

    def add(self, *row):
        if len(row) != len(self.header):
            raise InvalidParameter(f"row has {len(row)} fields, header has {len(self.header)}")
        self.rows.append(list(row))

    def render(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        for c in self.comments:
            buf.write(f"# {c}\r\n")
        return buf.getvalue()
