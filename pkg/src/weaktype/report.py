"""Bit-stable CSV/JSON report writing and run manifests."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from importlib import resources
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__

SIG_DIGITS = 12


def format_value(v):
    """Text form of one cell: 12 significant digits for floats."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, f".{SIG_DIGITS}g")
    if isinstance(v, (list, tuple)):
        return " ".join(format_value(x) for x in v)
    return str(v)


def _json_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            return format_value(v)
        return float(format(v, f".{SIG_DIGITS}g"))
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if hasattr(v, "item"):
        return _json_value(v.item())
    return str(v)


def render_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(_json_value(row.get(c))) for c in columns])
    return buf.getvalue()


def render_json(rows, columns=None, meta: dict | None = None) -> str:
    if columns is not None:
        rows = [{c: row.get(c) for c in columns} for row in rows]
    doc = {"rows": _json_value(list(rows))}
    if meta:
        doc["meta"] = _json_value(meta)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_report(rows, fmt: str, path, columns, meta: dict | None = None) -> Path:
    """Write ``rows`` (a list of dicts) as CSV or JSON; identical input gives identical bytes."""
    rows = list(rows)
    if fmt == "csv":
        text = render_csv(rows, columns)
    elif fmt == "json":
        text = render_json(rows, columns, meta)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def load_schema(name: str) -> dict:
    """A shipped JSON schema, e.g. ``load_schema("mc_report")``."""
    text = resources.files("weaktype").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None = None
    artifact_version: str = __version__
    started: str = field(default_factory=_now)
    finished: str | None = None
    outputs: list = field(default_factory=list)
    status: str = "running"
    error: str | None = None

    def finish(self, status: str = "ok", error: str | None = None):
        self.finished = _now()
        self.status = status
        self.error = error

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = _json_value(asdict(self))
        doc["outputs"] = [os.fspath(p) for p in self.outputs]
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        return path
