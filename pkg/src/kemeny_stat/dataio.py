"""CSV ingestion for the data matrix.

Plain comma-separated text with a mandatory header row.  Cells must parse
as floats; ``inf``/``-inf`` are legal scores (the pair metric only ever
compares values), missing or non-numeric cells are hard errors that point
at the offending line.
"""

from __future__ import annotations

import csv
import math
from typing import IO, Sequence

from .errors import DataError
from .multivar import DataMatrix

__all__ = ["load_csv"]


def load_csv(source: str | IO[str], *, columns: Sequence[str] | None = None) -> DataMatrix:
    """Read a headed CSV into a DataMatrix, optionally selecting columns."""
    if hasattr(source, "read"):
        rows = list(csv.reader(source))
    else:
        try:
            with open(source, newline="") as handle:
                rows = list(csv.reader(handle))
        except OSError as exc:
            raise DataError(f"cannot read {source}: {exc.strerror}") from None
    if not rows:
        raise DataError("empty input: expected a header row")
    header = [name.strip() for name in rows[0]]
    if not header or any(not name for name in header):
        raise DataError("header row contains empty column names")
    width = len(header)
    data: list[list[float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != width:
            raise DataError(
                f"line {lineno}: expected {width} fields, got {len(row)}"
            )
        parsed: list[float] = []
        for name, cell in zip(header, row):
            token = cell.strip()
            try:
                value = float(token)
            except ValueError:
                raise DataError(
                    f"line {lineno}, column {name!r}: not a number: {token!r}"
                ) from None
            if math.isnan(value):
                raise DataError(
                    f"line {lineno}, column {name!r}: missing values are not supported"
                )
            parsed.append(value)
        data.append(parsed)
    if len(data) < 2:
        raise DataError("need at least two data rows")
    matrix = DataMatrix(data, header)
    if columns is not None:
        matrix = matrix.select(list(columns))
    return matrix
