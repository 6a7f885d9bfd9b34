"""Experiment reports: self-describing CSV/JSON tables with verdicts.

A report echoes its full configuration (including field moduli and the
seed), so re-running the same config reproduces the file byte-for-byte
apart from the single timestamp field.
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import sys
from dataclasses import dataclass, field as dc_field

TIMESTAMP_KEY = "timestamp"


def _plain(value):
    """Coerce cell values to deterministic, serializable primitives."""
    if isinstance(value, complex):
        return [float(value.real), float(value.imag)]
    if hasattr(value, "item"):
        return _plain(value.item())
    if isinstance(value, float):
        return value
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


def _cell(value) -> str:
    value = _plain(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return "[" + " ".join(_cell(v) for v in value) + "]"
    if value is None:
        return ""
    return str(value)


@dataclass
class Report:
    tool: str
    config: dict
    moduli: dict[str, list[int]] = dc_field(default_factory=dict)
    columns: list[str] = dc_field(default_factory=list)
    rows: list[dict] = dc_field(default_factory=list)

    def __post_init__(self):
        self.created = datetime.datetime.now(datetime.timezone.utc).isoformat()

    def add_row(self, **kwargs):
        for key in kwargs:
            if key not in self.columns:
                self.columns.append(key)
        self.rows.append(kwargs)

    def extend(self, rows):
        for row in rows:
            self.add_row(**row)

    @property
    def n_fail(self) -> int:
        return sum(1 for row in self.rows if row.get("verdict") == "fail")

    @property
    def n_warn(self) -> int:
        return sum(1 for row in self.rows if row.get("verdict") == "warn")

    def exit_code(self) -> int:
        return 1 if self.n_fail else 0

    def header_lines(self) -> list[str]:
        lines = [f"# tool: {self.tool}"]
        lines.append(f"# config: {json.dumps(_plain_dict(self.config), sort_keys=True)}")
        for q in sorted(self.moduli, key=lambda s: int(s)):
            lines.append(f"# modulus[{q}]: {self.moduli[q]}")
        lines.append(f"# {TIMESTAMP_KEY}: {self.created}")
        return lines

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        for line in self.header_lines():
            buf.write(line + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_cell(row.get(col)) for col in self.columns])
        return buf.getvalue()

    def to_json_text(self) -> str:
        payload = {
            "tool": self.tool,
            "config": _plain_dict(self.config),
            "moduli": self.moduli,
            "columns": self.columns,
            "rows": [{k: _plain(v) for k, v in row.items()} for row in self.rows],
            "n_fail": self.n_fail,
            "n_warn": self.n_warn,
            TIMESTAMP_KEY: self.created,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv_text()
        if fmt == "json":
            return self.to_json_text()
        raise ValueError(f"unknown format {fmt!r}")

    def write(self, path: str | None, fmt: str) -> None:
        text = self.render(fmt)
        if path is None or path == "-":
            sys.stdout.write(text)
        else:
            with open(path, "w") as fh:
                fh.write(text)


def _plain_dict(d: dict) -> dict:
    return {k: _plain(v) for k, v in sorted(d.items())}


def strip_timestamp(text: str) -> str:
    """Drop the timestamp line so byte comparisons test reproducibility."""
    kept = [
        line
        for line in text.splitlines()
        if not line.startswith(f"# {TIMESTAMP_KEY}:") and f'"{TIMESTAMP_KEY}":' not in line
    ]
    return "\n".join(kept) + "\n"
