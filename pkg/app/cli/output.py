"""
Output Emitters
===============

Writes command results as JSON, CSV or an aligned text table.

JSON documents carry the schema version and the effective RunConfig. CSV
files always start with a header row; floats in CSV and table output are
written with 17 significant digits.
"""

import csv
import io
import json
import math
import sys
from enum import Enum
from typing import Any, Dict, List, Optional, TextIO

from pydantic import BaseModel

from app.config import settings
from app.models.enums.methods import OutputFormat
from app.schemas.run_config import RunConfig

class CommandOutput(BaseModel):
    """
    Fields:
        payload (Dict[str, Any]): JSON document body.
        rows (Optional[List[Dict[str, Any]]]): tabular form for csv/table; the
            payload's scalar fields form a single row when omitted.
        fieldnames (Optional[List[str]]): column order of rows.
        exit_code (int): process exit code after the output is written.
        error (Optional[Dict[str, Any]]): error document written to stderr with a nonzero exit code.
    """
    payload: Dict[str, Any]
    rows: Optional[List[Dict[str, Any]]] = None
    fieldnames: Optional[List[str]] = None
    exit_code: int = 0
    error: Optional[Dict[str, Any]] = None

def _plain(value: Any) -> Any:
    """Reduce models, enums and non-finite floats to JSON values."""
    if isinstance(value, BaseModel):
        return _plain(value.model_dump(mode="json"))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value

def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}" if math.isfinite(value) else ""
    if isinstance(value, Enum):
        return value.value
    return str(value)

def document(output: CommandOutput, config: RunConfig) -> Dict[str, Any]:
    return {"schema": settings.SCHEMA_VERSION, **_plain(output.payload), "config": _plain(config)}

def _table_rows(output: CommandOutput):
    if output.rows is not None:
        fieldnames = output.fieldnames or (list(output.rows[0]) if output.rows else [])
        return fieldnames, output.rows
    scalars = {k: v for k, v in _plain(output.payload).items() if not isinstance(v, (dict, list))}
    return list(scalars), [scalars]

def render(output: CommandOutput, config: RunConfig) -> str:
    if config.format == OutputFormat.JSON:
        return json.dumps(document(output, config), indent=2, ensure_ascii=False) + "\n"
    fieldnames, rows = _table_rows(output)
    if config.format == OutputFormat.CSV:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: format_cell(row.get(k)) for k in fieldnames})
        return buf.getvalue()
    cells = [[format_cell(row.get(k)) for k in fieldnames] for row in rows]
    widths = [max([len(name)] + [len(r[j]) for r in cells]) for j, name in enumerate(fieldnames)]
    lines = ["  ".join(name.rjust(w) for name, w in zip(fieldnames, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)
    return "\n".join(lines) + "\n"

def emit(output: CommandOutput, config: RunConfig, stream: Optional[TextIO] = None) -> None:
    """Write to config.out when set, else to the given stream (stdout)."""
    text = render(output, config)
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        (stream or sys.stdout).write(text)

def emit_error(error: Dict[str, Any], stream: Optional[TextIO] = None) -> None:
    (stream or sys.stderr).write(json.dumps(_plain(error), ensure_ascii=False) + "\n")
