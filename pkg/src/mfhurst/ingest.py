"""Price CSV ingestion and return-series derivation.

Parses daily closing prices from provider-style CSV exports into a
chronologically ordered :class:`PriceSeries`, then derives log returns
and absolute returns.  Calendar gaps (weekends, holidays) are left as-is:
consecutive rows are adjacent in event time, no imputation is performed.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

logger = logging.getLogger(__name__)

__all__ = [
    "CsvFormat",
    "FORMAT_PRESETS",
    "PriceRecord",
    "PriceSeries",
    "ReturnKind",
    "ReturnSeries",
    "EmptyInputError",
    "DuplicateDateError",
    "BadRowError",
    "TooShortError",
    "WrongKindError",
    "parse_csv",
    "read_returns_csv",
    "to_log_returns",
    "to_abs_returns",
]


class EmptyInputError(InputError):
    """The CSV contained a header but no data rows."""


class DuplicateDateError(InputError):
    """Two rows share the same calendar date."""


class BadRowError(InputError):
    """A row has an unparseable field or a non-positive price."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"row {line}: {reason}")
        self.line = line
        self.reason = reason


class TooShortError(InputError):
    """Fewer observations than the operation requires."""


class WrongKindError(InputError):
    """The return series has the wrong kind for this operation."""


# strptime patterns for the supported date spellings
_DATE_PATTERNS = {
    "YYYY-MM-DD": "%Y-%m-%d",
    "MM/DD/YYYY": "%m/%d/%Y",
}


@dataclass(frozen=True)
class CsvFormat:
    """Column names and number/date conventions of a price CSV.

    ``date_pattern`` is one of ``"YYYY-MM-DD"``, ``"MM/DD/YYYY"`` or
    ``"auto"`` (try both).  ``thousands`` may be empty when the export
    does not group digits.
    """

    date_column: str = "Date"
    price_column: str = "Price"
    date_pattern: str = "auto"
    decimal: str = "."
    thousands: str = ","

    def __post_init__(self):
        if self.date_pattern not in (*_DATE_PATTERNS, "auto"):
            raise InputError(f"unknown date pattern {self.date_pattern!r}")
        if self.decimal not in (".", ","):
            raise InputError("decimal separator must be '.' or ','")
        if self.thousands == self.decimal:
            raise InputError("thousands and decimal separators must differ")

    def parse_date(self, text: str) -> dt.date:
        text = text.strip().strip('"')
        patterns = (
            _DATE_PATTERNS.values()
            if self.date_pattern == "auto"
            else (_DATE_PATTERNS[self.date_pattern],)
        )
        for pat in patterns:
            try:
                return dt.datetime.strptime(text, pat).date()
            except ValueError:
                continue
        raise ValueError(f"unparseable date {text!r}")

    def parse_price(self, text: str) -> float:
        cleaned = text.strip().strip('"').replace(" ", "")
        if self.thousands:
            cleaned = cleaned.replace(self.thousands, "")
        if self.decimal != ".":
            cleaned = cleaned.replace(self.decimal, ".")
        value = float(cleaned)  # may raise ValueError
        if not math.isfinite(value) or value <= 0.0:
            raise ValueError(f"non-positive price {text!r}")
        return value


#: Named format presets reachable from the CLI.  "provider" matches the
#: common vendor export (Date / Price columns, US dates, grouped digits,
#: typically newest-first); "plain" reads this package's own serialized
#: price CSVs.
FORMAT_PRESETS = {
    "provider": CsvFormat(),
    "plain": CsvFormat(
        date_column="date",
        price_column="close",
        date_pattern="YYYY-MM-DD",
        thousands="",
    ),
}


@dataclass(frozen=True)
class PriceRecord:
    """One daily close: calendar date and strictly positive price."""

    date: dt.date
    close: float


@dataclass(frozen=True)
class PriceSeries:
    """Chronologically ordered daily closes for one asset."""

    asset: str
    records: tuple[PriceRecord, ...]

    def __post_init__(self):
        for rec in self.records:
            if not (rec.close > 0.0 and math.isfinite(rec.close)):
                raise InputError(f"non-positive close {rec.close!r} on {rec.date}")
        for a, b in zip(self.records, self.records[1:]):
            if b.date <= a.date:
                raise DuplicateDateError(
                    f"dates not strictly increasing at {b.date}"
                )

    def __len__(self) -> int:
        return len(self.records)

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(rec.date for rec in self.records)

    @property
    def closes(self) -> np.ndarray:
        return np.array([rec.close for rec in self.records], dtype=float)

    def to_csv(self) -> str:
        lines = ["date,close"]
        lines += [f"{r.date.isoformat()},{r.close!r}" for r in self.records]
        return "\n".join(lines) + "\n"


class ReturnKind(enum.Enum):
    LOG = "log"
    ABS = "abs"


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Date-indexed return values derived from a price series.

    One value per price transition, stamped with the later price date.
    """

    asset: str
    kind: ReturnKind
    dates: tuple[dt.date, ...]
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if arr.ndim != 1 or len(self.dates) != arr.size:
            raise InputError("dates and values must be 1-d and equal length")
        for a, b in zip(self.dates, self.dates[1:]):
            if b <= a:
                raise DuplicateDateError(f"dates not strictly increasing at {b}")
        if self.kind is ReturnKind.ABS and arr.size and arr.min() < 0.0:
            raise InputError("absolute returns must be non-negative")

    def __len__(self) -> int:
        return self.values.size

    def to_csv(self) -> str:
        lines = ["date,value"]
        lines += [
            f"{d.isoformat()},{float(v)!r}" for d, v in zip(self.dates, self.values)
        ]
        return "\n".join(lines) + "\n"


def _as_text_rows(raw) -> io.StringIO:
    if isinstance(raw, bytes):
        return io.StringIO(raw.decode("utf-8-sig"))
    if isinstance(raw, str):
        return io.StringIO(raw.removeprefix("﻿"))
    # file-like: read everything, decode if needed
    data = raw.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data.removeprefix("﻿"))


def parse_csv(
    raw,
    fmt: CsvFormat | None = None,
    *,
    asset: str = "",
    skip_bad_rows: bool = False,
) -> PriceSeries:
    """Parse a price CSV (bytes, text, or file-like) into a PriceSeries.

    Rows are sorted ascending by date regardless of input order, since
    provider exports are commonly newest-first.  Rows with unparseable
    fields or non-positive prices raise :class:`BadRowError` carrying the
    offending line number, unless ``skip_bad_rows`` is set, in which case
    they are dropped with a warning.
    """
    fmt = fmt or CsvFormat()
    reader = csv.DictReader(_as_text_rows(raw))
    if reader.fieldnames is None:
        raise EmptyInputError("no header row")
    header = [name.strip() for name in reader.fieldnames]
    for col in (fmt.date_column, fmt.price_column):
        if col not in header:
            raise BadRowError(1, f"missing column {col!r} in header {header}")

    rows: list[PriceRecord] = []
    for line, row in enumerate(reader, start=2):
        # normalize whitespace in keys once per row (DictReader keeps raw names)
        cells = {k.strip(): (v or "") for k, v in row.items() if k is not None}
        if not any(cells.values()):
            continue  # blank line
        try:
            date = fmt.parse_date(cells.get(fmt.date_column, ""))
            close = fmt.parse_price(cells.get(fmt.price_column, ""))
        except ValueError as exc:
            if skip_bad_rows:
                logger.warning("skipping row %d: %s", line, exc)
                continue
            raise BadRowError(line, str(exc)) from exc
        rows.append(PriceRecord(date, close))

    if not rows:
        raise EmptyInputError("no data rows")
    rows.sort(key=lambda rec: rec.date)
    for a, b in zip(rows, rows[1:]):
        if a.date == b.date:
            raise DuplicateDateError(f"duplicate date {a.date.isoformat()}")
    return PriceSeries(asset=asset, records=tuple(rows))


def to_log_returns(prices: PriceSeries) -> ReturnSeries:
    """Log returns between consecutive closes, stamped with the later date."""
    if len(prices) < 2:
        raise TooShortError("need at least 2 price records")
    closes = prices.closes
    values = np.log(closes[1:] / closes[:-1])
    return ReturnSeries(
        asset=prices.asset,
        kind=ReturnKind.LOG,
        dates=prices.dates[1:],
        values=values,
    )


def to_abs_returns(returns: ReturnSeries) -> ReturnSeries:
    """Element-wise magnitudes of a log-return series (volatility proxy)."""
    if returns.kind is not ReturnKind.LOG:
        raise WrongKindError("input is already an absolute-return series")
    return ReturnSeries(
        asset=returns.asset,
        kind=ReturnKind.ABS,
        dates=returns.dates,
        values=np.abs(returns.values),
    )


def read_returns_csv(
    raw, *, asset: str = "", kind: ReturnKind = ReturnKind.LOG
) -> ReturnSeries:
    """Read a serialized return series (``date,value`` columns) back in."""
    reader = csv.DictReader(_as_text_rows(raw))
    if reader.fieldnames is None or not {"date", "value"} <= set(reader.fieldnames):
        raise EmptyInputError("expected a 'date,value' header")
    dates: list[dt.date] = []
    values: list[float] = []
    for line, row in enumerate(reader, start=2):
        if not any((v or "") for v in row.values()):
            continue
        try:
            dates.append(dt.date.fromisoformat((row.get("date") or "").strip()))
            values.append(float((row.get("value") or "").strip()))
        except ValueError as exc:
            raise BadRowError(line, str(exc)) from exc
    if not values:
        raise EmptyInputError("no data rows")
    return ReturnSeries(
        asset=asset, kind=kind, dates=tuple(dates), values=np.array(values)
    )
