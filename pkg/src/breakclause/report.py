"""Valuation report record and deterministic CSV output."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

DECOMPOSITION_TOL = 1e-10


@dataclass(frozen=True)
class ValuationReport:
    """Adjusted value of one contract from B's side.

    ``adjusted_value = v0 - bcva + bdva + bc_option``; with a break clause the
    credit adjustments only cover defaults before the first break date and
    ``bc_option`` carries everything after it.
    """

    v0: float
    bcva: float
    bdva: float
    bc_option: float
    adjusted_value: float
    par_level: float | None = None
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        expected = self.v0 - self.bcva + self.bdva + self.bc_option
        if abs(expected - self.adjusted_value) > DECOMPOSITION_TOL * max(1.0, abs(self.v0)):
            raise ValueError(
                f"adjusted value {self.adjusted_value!r} does not decompose "
                f"(v0 - bcva + bdva + bc_option = {expected!r})"
            )

    @classmethod
    def assemble(cls, v0, bcva, bdva, bc_option=0.0, par_level=None, **diagnostics):
        return cls(v0, bcva, bdva, bc_option, v0 - bcva + bdva + bc_option, par_level, diagnostics)

    def as_row(self) -> dict[str, Any]:
        row = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "diagnostics"}
        row.update(self.diagnostics)
        return row


def format_value(x: Any) -> str:
    """Stable text form: 12 significant digits, plain tokens for inf/nan/None."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x == 0.0:
            return "0"
        return f"{x:.12g}"
    return str(x)


@dataclass
class Table:
    """Named rows of results with a units line for the header."""

    name: str
    columns: Sequence[str]
    rows: list[Sequence[Any]]
    units: Mapping[str, str] = field(default_factory=dict)

    def header(self) -> list[str]:
        return [f"{c} [{self.units[c]}]" if c in self.units else c for c in self.columns]

    def column(self, name: str) -> list[Any]:
        i = list(self.columns).index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for r in self.rows:
            w.writerow([format_value(v) for v in r])
        return buf.getvalue()

    def write(self, directory: Path) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.name}.csv"
        path.write_text(self.to_csv())
        return path


def table_from_records(name: str, records: Iterable[Mapping[str, Any]], units=None) -> Table:
    records = list(records)
    columns: list[str] = []
    for r in records:
        for k in r:
            if k not in columns:
                columns.append(k)
    rows = [[r.get(c) for c in columns] for r in records]
    return Table(name, columns, rows, units or {})
