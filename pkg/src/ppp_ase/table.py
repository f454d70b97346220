"""Sweep tables and their CSV form.

Floats are written with 17 significant digits so the file round-trips exactly;
divergent values are written as ``inf``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return format(value, ".17g")


def parse_value(text: str):
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class SweepTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(list(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def __len__(self):
        return len(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        reader = csv.reader(io.StringIO(text))
        columns = next(reader)
        return cls(columns, [[parse_value(v) for v in row] for row in reader])

    @classmethod
    def read(cls, path) -> "SweepTable":
        with open(path, newline="") as fh:
            return cls.from_csv(fh.read())
