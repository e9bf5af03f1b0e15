"""
CSV tables of gappy series and log-return alignment of price tables.

Input CSV: comma separated, one header row, an optional leading date
column (ISO 8601), missing cells written as an empty field, ``NA`` or
``NaN``.
"""

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from .errors import DomainError, FormatError, InputError, ParseError
from .series import GappySeries

__all__ = ["DataTable", "read_csv", "write_csv", "format_value", "align_and_returns"]

MISSING_TOKENS = ("", "NA", "NaN")


def _date_key(s):
    try:
        return datetime.fromisoformat(s)
    except ValueError:
        return s


@dataclass
class DataTable:
    """Named, equal-length gappy series with an optional date index."""

    names: list
    columns: list
    dates: list | None = None

    def __post_init__(self):
        self.names = list(self.names)
        self.columns = [GappySeries(c) for c in self.columns]
        if len(self.names) != len(self.columns):
            raise InputError("one name per column is required")
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise InputError(f"columns differ in length: {sorted(lengths)}")
        if self.dates is not None:
            self.dates = list(self.dates)
            if self.columns and len(self.dates) != len(self.columns[0]):
                raise InputError("date index length differs from the columns")
            keys = [_date_key(d) for d in self.dates]
            try:
                ordered = all(a < b for a, b in zip(keys, keys[1:]))
            except TypeError:
                ordered = all(a < b for a, b in zip(self.dates, self.dates[1:]))
            if not ordered:
                raise InputError("date index must be strictly increasing")

    def __len__(self):
        return len(self.columns[0]) if self.columns else 0

    def __getitem__(self, name):
        return self.columns[self.names.index(name)]

    def __eq__(self, other):
        if not isinstance(other, DataTable):
            return NotImplemented
        return self.names == other.names and self.dates == other.dates and all(
            a == b for a, b in zip(self.columns, other.columns)
        )


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_csv(path, missing_tokens=MISSING_TOKENS):
    """
    Read a table of gappy series.

    The first column becomes the date index when any of its non-missing
    cells is not a number. Parse errors report 1-based line and column.
    """
    missing = {t.strip() for t in missing_tokens}
    if hasattr(path, "read"):
        text = path.read()
    else:
        text = Path(path).read_text()
    rows = [r for r in csv.reader(io.StringIO(text))]
    rows = [r for r in rows if r and not (len(r) == 1 and r[0].startswith("#"))]
    if not rows:
        raise FormatError("empty file: a header row is required")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise FormatError(f"line {lineno}: expected {len(header)} fields, got {len(r)}")
    first = [r[0].strip() for r in body]
    has_dates = bool(header) and any(t not in missing and not _is_number(t) for t in first)
    start = 1 if has_dates else 0
    columns = []
    for j in range(start, len(header)):
        values = []
        for lineno, r in enumerate(body, start=2):
            tok = r[j].strip()
            if tok in missing:
                values.append(None)
                continue
            try:
                v = float(tok)
            except ValueError:
                raise ParseError(
                    f"line {lineno}, column {j + 1} ({header[j]!r}): cannot parse {tok!r}",
                    row=lineno,
                    column=j + 1,
                ) from None
            if not math.isfinite(v):
                raise ParseError(f"line {lineno}, column {j + 1}: non-finite value {tok!r}", lineno, j + 1)
            values.append(v)
        columns.append(GappySeries(values))
    return DataTable(header[start:], columns, first if has_dates else None)


def format_value(v, precision=6):
    """``precision`` significant digits, or the shortest exact repr if None."""
    return repr(float(v)) if precision is None else f"{v:.{precision}g}"


def write_csv(table, path=None, precision=None, date_header="date"):
    """
    Write ``table`` as CSV; absent cells become empty fields.

    ``precision=None`` writes every value exactly (round-trips through
    :func:`read_csv`). Returns the CSV text.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    lead = [date_header] if table.dates is not None else []
    w.writerow(lead + table.names)
    for i in range(len(table)):
        row = [table.dates[i]] if table.dates is not None else []
        for c in table.columns:
            v = c[i]
            row.append("" if v is None else format_value(v, precision))
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        if hasattr(path, "write"):
            path.write(text)
        else:
            Path(path).write_text(text)
    return text


def _price_column(table, column):
    if column is not None:
        return table[column]
    for name in ("Close", "close", "Adj Close"):
        if name in table.names:
            return table[name]
    if len(table.names) == 1:
        return table.columns[0]
    raise InputError(f"cannot tell which of {table.names} is the price column")


def align_and_returns(tables, column=None):
    """
    Log returns of several price tables on their union calendar.

    Parameters
    ----------
    tables : mapping of name -> DataTable
        Each table needs a date index and a price column (``Close`` by
        default, or the only column).
    column : str, optional
        Name of the price column in every table.

    Returns
    -------
    DataTable
        One return series per input table. A date missing from a table is a
        gap; a return is absent unless both prices it spans are present, so
        the first date is always absent.
    """
    prices = {}
    for name, t in tables.items():
        if t.dates is None:
            raise InputError(f"table {name!r} has no date index")
        p = _price_column(t, column)
        obs = p.observed()
        if np.any(obs <= 0):
            raise DomainError(f"table {name!r} has non-positive prices")
        prices[name] = dict(zip(t.dates, p))
    calendar = sorted({d for t in tables.values() for d in t.dates}, key=_date_key)
    columns = []
    for name in tables:
        p = [prices[name].get(d) for d in calendar]
        r = [None]
        for prev, cur in zip(p, p[1:]):
            r.append(None if prev is None or cur is None else math.log(cur / prev))
        columns.append(GappySeries(r))
    return DataTable(list(tables), columns, calendar)
