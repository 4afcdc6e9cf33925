"""Serialization: self-describing CSV tables and JSON run manifests.

Every table starts with `#`-prefixed comment lines carrying the tool
version, the command, a units note, and the full effective configuration,
so a file alone suffices to rerun the experiment that produced it.  Floats
are written with 12 significant digits; seeds as exact integers.  Outputs
contain no timestamps: rerunning a command byte-identically reproduces its
files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

from ._version import __version__
from .config import ConfigError, RunConfig

__all__ = [
    "format_value",
    "header_lines",
    "write_table",
    "read_table",
    "write_manifest",
    "load_manifest",
]

UNITS_NOTE = "units: time ms, potential mV, h dimensionless, D in drive-current units"


def format_value(value: Any) -> str:
    """Render one value for a table cell or header line."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    return str(value)


def header_lines(command: str, cfg: RunConfig) -> list[str]:
    """Comment header: version, command, units, full effective config."""
    lines = [
        f"# ifburst {__version__}",
        f"# command = {command}",
        f"# {UNITS_NOTE}",
    ]
    for section, entries in cfg.to_dict().items():
        for key, value in entries.items():
            lines.append(f"# {section}.{key} = {format_value(value)}")
    return lines


def write_table(
    path: Union[str, Path],
    command: str,
    cfg: RunConfig,
    columns: Sequence[tuple[str, Sequence]],
) -> Path:
    """Write a commented CSV table; returns the path written."""
    names = [name for name, _ in columns]
    arrays = [np.asarray(values) for _, values in columns]
    if arrays and any(a.shape[0] != arrays[0].shape[0] for a in arrays):
        raise ValueError("all table columns must have equal length")
    n_rows = arrays[0].shape[0] if arrays else 0

    lines = header_lines(command, cfg)
    lines.append(",".join(names))
    for i in range(n_rows):
        lines.append(",".join(format_value(a[i]) for a in arrays))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_table(path: Union[str, Path]) -> tuple[list[str], dict[str, np.ndarray]]:
    """Parse a table written by write_table: (comment lines, column arrays).

    Columns come back as float arrays when every entry parses as a number,
    otherwise as object arrays of strings.
    """
    comments: list[str] = []
    rows: list[list[str]] = []
    names: list[str] = []
    for line in Path(path).read_text().splitlines():
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line)
        elif not names:
            names = line.split(",")
        else:
            rows.append(line.split(","))
    columns: dict[str, np.ndarray] = {}
    for j, name in enumerate(names):
        raw = [row[j] for row in rows]
        try:
            columns[name] = np.array([float(x) for x in raw], dtype=np.float64)
        except ValueError:
            columns[name] = np.array(raw, dtype=object)
    return comments, columns


def write_manifest(path: Union[str, Path], command: str, cfg: RunConfig) -> Path:
    """Write the machine-readable run manifest (JSON, full precision)."""
    payload = {
        "tool": "ifburst",
        "version": __version__,
        "command": command,
        "config": cfg.to_dict(),
    }
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def load_manifest(path: Union[str, Path]) -> tuple[str, RunConfig]:
    """Read a manifest back into (command, RunConfig); strict validation."""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(payload, dict) or "config" not in payload:
        raise ConfigError(f"manifest {path} lacks a config block")
    command = str(payload.get("command", ""))
    return command, RunConfig.from_dict(payload["config"])
