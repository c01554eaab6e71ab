"""
Plotter-ready tables
====================

:class:`Dataset` is the output of every CLI sub-command: a header plus rows of
numbers. Two serialisations share one number format so a CSV and a JSON
dump of the same run carry the same digits:

* finite floats - ``format(x, ".17g")`` (round-trip exact, lowercase ``e``);
* infinities - ``inf`` / ``-inf``;
* ``None`` in the ``steps`` column - ``continuous``.

Output is byte-identical for identical rows, whatever the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

SCHEMA_VERSION = 1

Cell = float | int | str | bool | None


def format_number(value: Cell) -> str:
    """Canonical text of one cell."""
    if value is None:
        return "continuous"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(value)


def _json_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, numbers.Real) and math.isfinite(float(value)):
        return format_number(value)
    # non-finite numbers and the continuous marker are not JSON numbers
    return json.dumps(format_number(value))


@dataclass
class Dataset:
    """
    One result table.

    Attributes
    ----------
    command : str
        Sub-command that produced the rows (``workdist``, ``bounds``, ...).
    columns : list[str]
        Header; every row has exactly this many cells.
    rows : list[tuple]
        Cells in column order.
    """

    command: str
    columns: list[str]
    rows: list[tuple[Cell, ...]] = field(default_factory=list)

    def __post_init__(self) -> None:
        for k, row in enumerate(self.rows):
            self._check(row, k)

    def _check(self, row: Sequence[Cell], k: int) -> None:
        if len(row) != len(self.columns):
            raise ValueError(
                f"Row {k} of '{self.command}' has {len(row)} cells, expected {len(self.columns)}"
            )

    def append(self, row: Sequence[Cell]) -> None:
        self._check(row, len(self.rows))
        self.rows.append(tuple(row))

    def column(self, name: str) -> list[Cell]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)

    # ------------------------------------------------------------------
    # Serialisation
    # ------------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_number(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        """Single object ``{"schema_version", "command", "columns", "rows"}``."""
        cells = ("[" + ", ".join(_json_cell(v) for v in row) + "]" for row in self.rows)
        rows = ",\n    ".join(cells)
        body = f"[\n    {rows}\n  ]" if self.rows else "[]"
        return (
            "{\n"
            f'  "schema_version": {SCHEMA_VERSION},\n'
            f'  "command": {json.dumps(self.command)},\n'
            f'  "columns": {json.dumps(self.columns)},\n'
            f'  "rows": {body}\n'
            "}\n"
        )

    def render(self, output_format: str = "csv") -> str:
        if output_format == "csv":
            return self.to_csv()
        if output_format == "json":
            return self.to_json()
        raise ValueError(f"Unknown output format {output_format!r}")

    def write(self, path: str | Path, output_format: str = "csv") -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.render(output_format), encoding="utf-8", newline="")
        return target
