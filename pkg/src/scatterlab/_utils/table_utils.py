#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Deterministic result tables rendered as CSV or JSON."""

import csv
import io
import json
import math
import os
from datetime import UTC, datetime

import numpy as np
from attr import dataclass, field

from scatterlab.config import config
from scatterlab.constants import OutputFormat
from scatterlab.exception import DomainError


def result_timestamp() -> str:
    """Fixed timestamp so identical runs give identical bytes.

    SOURCE_DATE_EPOCH wins over the configured value when set.
    """
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), tz=UTC).strftime("%Y-%m-%dT%H:%M:%SZ")
    return config.get("result_timestamp")


def format_value(value) -> str:
    """Shortest round-trip text for numbers; lowercase booleans."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value)) if math.isfinite(value) else str(float(value))
    if value is None:
        return ""
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


@dataclass
class ResultTable:
    subcommand: str
    columns: list[str]
    rows: list[list] = field(factory=list)
    metadata: dict = field(factory=dict)

    def __attrs_post_init__(self):
        for row in self.rows:
            self._check_row(row)

    def _check_row(self, row):
        if len(row) != len(self.columns):
            raise DomainError(f"Row has {len(row)} values for {len(self.columns)} columns")

    def add_row(self, *values):
        row = [v.item() if isinstance(v, np.generic) else v for v in values]
        self._check_row(row)
        self.rows.append(row)

    def column(self, name: str) -> list:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def to_csv(self) -> str:
        """RFC 4180 CSV preceded by ``# key=value`` metadata lines."""
        buffer = io.StringIO()
        for key, value in _flatten(self.metadata):
            buffer.write(f"# {key}={format_value(value)}\r\n")
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        return buffer.getvalue()

    def to_json(self) -> str:
        document = {
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": [[_json_value(v) for v in row] for row in self.rows],
        }
        return json.dumps(document, indent=2, sort_keys=True) + "\n"

    def render(self, output_format: OutputFormat) -> str:
        if output_format == "csv":
            return self.to_csv()
        if output_format == "json":
            return self.to_json()
        raise DomainError(f"Unknown output format {output_format!r}")


def _flatten(data: dict, prefix: str = ""):
    for key in sorted(data):
        value = data[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, prefix=f"{name}.")
        else:
            yield name, value
