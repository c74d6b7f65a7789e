"""OHLCV parsing, trading calendar, daily returns, and 3-class labels.

The trading calendar is defined as exactly the dates present in the price
file; no external holiday table is consulted. Returns are simple fractional
changes of the adjusted close. Class labels use an inclusive neutral band:
+1 for return > pos_threshold, -1 for return < neg_threshold, 0 otherwise.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass

import numpy as np

from .errors import (
    DataError,
    DuplicateDate,
    InvalidThresholds,
    MissingColumn,
    NegativePrice,
    NonMonotonicDate,
    TooShort,
)

PRICE_COLUMNS = ("date", "open", "high", "low", "close", "adj_close", "volume")


@dataclass(frozen=True)
class ClassThresholds:
    """Return-class band edges; boundaries map to the neutral class."""

    pos: float = 0.01
    neg: float = -0.01


#: Single shared instance so labeling and forecast-signal mapping cannot drift.
DEFAULT_THRESHOLDS = ClassThresholds()


@dataclass(frozen=True)
class PriceBar:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    adj_close: float
    volume: int


@dataclass(frozen=True)
class PriceSeries:
    bars: tuple[PriceBar, ...]

    def __len__(self) -> int:
        return len(self.bars)

    def dates(self) -> tuple[dt.date, ...]:
        return tuple(b.date for b in self.bars)

    def calendar(self) -> tuple[dt.date, ...]:
        """Trading calendar: exactly the dates present in the series."""
        return self.dates()

    def adj_closes(self) -> np.ndarray:
        return np.array([b.adj_close for b in self.bars], dtype=float)

    def closes(self) -> np.ndarray:
        return np.array([b.close for b in self.bars], dtype=float)

    def highs(self) -> np.ndarray:
        return np.array([b.high for b in self.bars], dtype=float)

    def lows(self) -> np.ndarray:
        return np.array([b.low for b in self.bars], dtype=float)

    def volumes(self) -> np.ndarray:
        return np.array([b.volume for b in self.bars], dtype=float)

    def window(self, start: dt.date | None, end: dt.date | None) -> "PriceSeries":
        """Bars with start <= date <= end (either bound may be None)."""
        kept = tuple(
            b
            for b in self.bars
            if (start is None or b.date >= start) and (end is None or b.date <= end)
        )
        return PriceSeries(kept)


@dataclass(frozen=True)
class ReturnSeries:
    dates: tuple[dt.date, ...]
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.dates)

    def to_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def window(self, start: dt.date | None, end: dt.date | None) -> "ReturnSeries":
        pairs = [
            (d, v)
            for d, v in zip(self.dates, self.values)
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        return ReturnSeries(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


@dataclass(frozen=True)
class ClassSeries:
    dates: tuple[dt.date, ...]
    classes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.dates)

    def window(self, start: dt.date | None, end: dt.date | None) -> "ClassSeries":
        pairs = [
            (d, c)
            for d, c in zip(self.dates, self.classes)
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        return ClassSeries(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


def parse_price_csv(text: str) -> PriceSeries:
    """Parse an OHLCV document with header date,open,high,low,close,adj_close,volume.

    Rows must be sorted ascending by ISO-8601 date; any unparsable or
    invariant-violating row aborts the parse with its 1-based data row index.
    """
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn("empty document: no header row") from None
    header = [h.strip() for h in header]
    missing = [c for c in PRICE_COLUMNS if c not in header]
    if missing:
        raise MissingColumn(f"missing column(s): {', '.join(missing)}")
    idx = {c: header.index(c) for c in PRICE_COLUMNS}

    bars: list[PriceBar] = []
    prev_date: dt.date | None = None
    for row_no, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < len(header):
            raise DataError(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
        try:
            date = dt.date.fromisoformat(row[idx["date"]].strip())
        except ValueError:
            raise DataError(f"row {row_no}: unparsable date {row[idx['date']]!r}") from None
        prices = {}
        for col in ("open", "high", "low", "close", "adj_close"):
            raw = row[idx[col]].strip()
            try:
                prices[col] = float(raw)
            except ValueError:
                raise DataError(f"row {row_no}: unparsable {col} {raw!r}") from None
        raw_vol = row[idx["volume"]].strip()
        try:
            volume = int(raw_vol)
        except ValueError:
            raise DataError(f"row {row_no}: unparsable volume {raw_vol!r}") from None

        if any(prices[c] < 0 for c in ("open", "high", "low", "close")) or prices["adj_close"] <= 0:
            raise NegativePrice(f"row {row_no}: non-positive price field")
        if volume < 0:
            raise DataError(f"row {row_no}: negative volume")
        lo, hi = prices["low"], prices["high"]
        if not (lo <= prices["open"] <= hi and lo <= prices["close"] <= hi):
            raise DataError(f"row {row_no}: OHLC ordering violated (low <= open,close <= high)")

        if prev_date is not None:
            if date == prev_date:
                raise DuplicateDate(f"row {row_no}: duplicate date {date.isoformat()}")
            if date < prev_date:
                raise NonMonotonicDate(
                    f"row {row_no}: date {date.isoformat()} before {prev_date.isoformat()}"
                )
        prev_date = date
        bars.append(PriceBar(date=date, volume=volume, **prices))

    return PriceSeries(tuple(bars))


def price_series_to_csv(prices: PriceSeries) -> str:
    """Canonical serialization; round-trips through parse_price_csv."""
    lines = [",".join(PRICE_COLUMNS)]
    for b in prices.bars:
        lines.append(
            f"{b.date.isoformat()},{b.open:.12g},{b.high:.12g},{b.low:.12g},"
            f"{b.close:.12g},{b.adj_close:.12g},{b.volume}"
        )
    return "\n".join(lines) + "\n"


def compute_returns(prices: PriceSeries) -> ReturnSeries:
    """Daily simple returns of the adjusted close; entry i is dated at bar i+1."""
    if len(prices) < 2:
        raise TooShort(f"need at least 2 bars, got {len(prices)}")
    adj = prices.adj_closes()
    values = adj[1:] / adj[:-1] - 1.0
    return ReturnSeries(prices.dates()[1:], tuple(float(v) for v in values))


def classify_return(
    value: float,
    pos_threshold: float = DEFAULT_THRESHOLDS.pos,
    neg_threshold: float = DEFAULT_THRESHOLDS.neg,
) -> int:
    if value > pos_threshold:
        return 1
    if value < neg_threshold:
        return -1
    return 0


def label_returns(
    returns: ReturnSeries,
    pos_threshold: float = DEFAULT_THRESHOLDS.pos,
    neg_threshold: float = DEFAULT_THRESHOLDS.neg,
) -> ClassSeries:
    """3-class labels per return; band boundaries are neutral (class 0)."""
    if not (neg_threshold < 0.0 < pos_threshold):
        raise InvalidThresholds(
            f"need neg_threshold < 0 < pos_threshold, got {neg_threshold}, {pos_threshold}"
        )
    classes = tuple(classify_return(v, pos_threshold, neg_threshold) for v in returns.values)
    return ClassSeries(returns.dates, classes)
