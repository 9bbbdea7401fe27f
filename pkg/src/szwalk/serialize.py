"""Deterministic artifact writers.

Every run artifact must be byte-identical across repeat runs with the same
configuration and seed, so floats are printed with an explicit shortest
round-trip format, JSON keys are sorted, and each writer terminates the file
with a single newline.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

FLOAT_FORMAT = "%.17g"


def format_value(value) -> str:
    """Render one CSV cell. Floats use round-trip precision."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path, header: list, rows: list) -> None:
    """Write rows of cells under a header line."""
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row width {len(row)} != header width {len(header)}")
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _plain(value):
    """Recursively convert numpy scalars and arrays to JSON-native types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def json_dumps(payload: dict) -> str:
    """Canonical JSON text: sorted keys, stable separators, one trailing
    newline."""
    return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json_dumps(payload))


def stamped(payload: dict, config: dict) -> dict:
    """Attach the schema version and the fully resolved configuration."""
    out = dict(payload)
    out["schema_version"] = SCHEMA_VERSION
    out["config"] = _plain(config)
    return out
