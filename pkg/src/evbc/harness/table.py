"""CSV tables with ``#``-prefixed metadata lines."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from ..errors import ColumnNotFound


@dataclass
class CsvTable:
    header: list
    rows: list = field(default_factory=list)
    metadata: list = field(default_factory=list)

    def add_row(self, row):
        if len(row) != len(self.header):
            raise ValueError(f"row has {len(row)} values, header has {len(self.header)}")
        self.rows.append(tuple(row))

    def note(self, key: str, value) -> None:
        self.metadata.append((key, value))

    def meta(self, key: str):
        for k, v in self.metadata:
            if k == key:
                return v
        raise KeyError(key)

    def column(self, name: str) -> list:
        try:
            i = self.header.index(name)
        except ValueError:
            raise ColumnNotFound(f"no column {name!r}; have {self.header}") from None
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata:
            buf.write(f"# {key}: {value}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def payload(self) -> str:
        """CSV body without metadata lines."""
        return "".join(line for line in self.to_csv().splitlines(True) if not line.startswith("#"))

    @classmethod
    def from_csv(cls, text: str) -> "CsvTable":
        meta, body = [], []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                meta.append((key.strip(), value.strip()))
            elif line.strip():
                body.append(line)
        if not body:
            raise ValueError("table has no header")
        reader = csv.reader(body)
        header = next(reader)
        rows = [tuple(float(v) if v != "" else math.nan for v in r) for r in reader]
        return cls(header, rows, meta)


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    return repr(float(v))
