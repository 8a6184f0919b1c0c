"""Loading for the simulator's flat CSV layouts.

The simulator emits three table shapes (per-pair error reports, bound
curves, exponent sweeps).  This module reads them back as row dicts and
checks, before any drawing starts, that every column a figure will touch
actually exists, so a truncated or hand-edited file fails with the column
name instead of a KeyError somewhere inside matplotlib.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

import csv

from .errors import EmptyInput, SchemaError

Row = dict[str, str]


def read_rows(paths: Iterable[str | Path], required: Sequence[str]) -> list[Row]:
    """Read one or more CSV files and concatenate their data rows.

    Every file must carry all of ``required``; the first column found
    missing is raised as a :class:`SchemaError` naming it.  Raises
    :class:`EmptyInput` when the concatenation holds no data rows at all.
    """
    rows: list[Row] = []
    seen: list[str] = []
    for path in paths:
        seen.append(str(path))
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for column in required:
                if column not in header:
                    raise SchemaError(column, str(path))
            rows.extend(reader)
    if not rows:
        raise EmptyInput(f"no data rows in {', '.join(seen)}")
    return rows


def cell_float(row: Row, column: str) -> float | None:
    """Parse a cell as a float, mapping the empty string to None.

    The simulator leaves cells empty when a quantity does not apply (the
    block length of an asymptotic bound, the estimate of an analytic-only
    row); those come back as None rather than a parse error.
    """
    text = row[column]
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"column {column!r}: cannot parse {text!r} as a number") from None
