from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)
from typing import Sequence

import mpmath

from sphere_det.hessians import predicted_sign
from sphere_det.models import HessianCell
from sphere_det.scalars import ExactScalar


class OutputFormat(StrEnum):
    JSON = "json"
    CSV = "csv"
    MD = "md"


CSV_COLUMNS = ["n", "k", "value_exact", "value_approx", "sign", "predicted_sign"]


@dataclass(frozen=True, slots=True)
class AlphaRow:
    k: int
    term: ExactScalar

    @property
    def positive(self) -> bool:
        return self.term.sign() > 0

    def to_json(self, digits: int = 20) -> dict:
        return {"k": self.k, "term": self.term.to_json(digits), "positive": self.positive}


def _approx(value: ExactScalar, digits: int) -> str:
    return mpmath.nstr(value.numeric(), digits)


def render_cells(cells: Sequence[HessianCell], fmt: OutputFormat, digits: int = 20) -> str:
    ordered = sorted(cells, key=lambda cell: (cell.n, cell.k))
    if fmt is OutputFormat.JSON:
        payload = [dict(cell.to_json(digits), predicted_sign=predicted_sign(cell.n, cell.k)) for cell in ordered]
        return json.dumps(payload, indent=2)
    if fmt is OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for cell in ordered:
            writer.writerow(
                [cell.n, cell.k, str(cell.value), _approx(cell.value, digits), cell.sign, predicted_sign(cell.n, cell.k)]
            )
        return buffer.getvalue().rstrip("\n")
    return _markdown_grid(ordered)


def _markdown_grid(cells: Sequence[HessianCell]) -> str:
    """Sign grid; cells with k >= n-1 are bold, mismatches carry a '!'."""
    ns = sorted({cell.n for cell in cells})
    ks = sorted({cell.k for cell in cells})
    by_coord = {(cell.n, cell.k): cell for cell in cells}
    lines = [
        "| n \\ k | " + " | ".join(str(k) for k in ks) + " |",
        "|---|" + "---|" * len(ks),
    ]
    for n in ns:
        row = []
        for k in ks:
            cell = by_coord.get((n, k))
            if cell is None:
                row.append("")
                continue
            text = cell.sign
            if k >= 2 and cell.sign != predicted_sign(n, k):
                text += "!"
            row.append(f"**{text}**" if k >= n - 1 else text)
        lines.append(f"| {n} | " + " | ".join(row) + " |")
    mismatches = sum(
        1 for cell in cells if cell.k >= 2 and cell.sign != predicted_sign(cell.n, cell.k)
    )
    lines.append("")
    lines.append(f"bold: k >= n-1; mismatches with the predicted pattern: {mismatches}")
    return "\n".join(lines)


def render_alpha(rows: Sequence[AlphaRow], fmt: OutputFormat, digits: int = 20) -> str:
    if fmt is OutputFormat.JSON:
        return json.dumps([row.to_json(digits) for row in rows], indent=2)
    if fmt is OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["k", "term_exact", "term_approx", "positive"])
        for row in rows:
            writer.writerow([row.k, str(row.term), _approx(row.term, digits), str(row.positive).lower()])
        return buffer.getvalue().rstrip("\n")
    lines = ["| k | term | approx | positive |", "|---|---|---|---|"]
    for row in rows:
        lines.append(f"| {row.k} | {row.term} | {_approx(row.term, digits)} | {'yes' if row.positive else 'no'} |")
    return "\n".join(lines)
