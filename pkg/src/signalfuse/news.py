"""News cleaning, trading-day assignment, daily mode voting, and lagged joins.

Article timestamps are Eastern Time; naive timestamps are taken as ET and
timezone-aware ones are converted. Articles stamped at or after 16:00 ET, or
on a weekend, belong to the next trading day. Days with no articles carry a
neutral label and a missing flag so downstream consumers can tell true
neutrality from absent data.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence
from zoneinfo import ZoneInfo

from .errors import BeyondCalendar, DataError, EmptyGroup, LagOutOfRange, MissingColumn
from .market_data import ClassSeries
from .signals import SignalSeries

SOURCES = ("DowJones", "Benzinga", "Barron", "MarketWatch", "WSJ")
MODELS = ("gpt2", "finbert")

DEFAULT_BOILERPLATE_MARKERS = ("Copyright", "Photo by", "Write to ")
DEFAULT_DROP_KEYWORDS = ("Amundi S&P 500",)

MARKET_CLOSE = dt.time(16, 0)
EASTERN = ZoneInfo("America/New_York")

NEWS_COLUMNS = ("timestamp_et", "source", "title", "text")
SENTIMENT_COLUMNS = ("timestamp_et", "source", "model", "label", "score")


@dataclass(frozen=True)
class NewsArticle:
    timestamp: dt.datetime | None
    source: str
    title: str
    text: str


@dataclass(frozen=True)
class SentimentRecord:
    timestamp: dt.datetime
    source: str
    model: str
    label: int
    score: float | None = None


@dataclass(frozen=True)
class DailySentiment:
    trading_day: dt.date
    source: str
    model: str
    label: int
    vote_counts: Mapping[int, int]
    first_label: int


@dataclass(frozen=True)
class AlignedRow:
    trading_day: dt.date
    return_class: int
    sentiments: Mapping[tuple[str, str], int]
    missing: Mapping[tuple[str, str], bool]


@dataclass(frozen=True)
class AlignedDataset:
    rows: tuple[AlignedRow, ...]
    lag: int
    keys: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def signal_series(self, source: str, model: str) -> SignalSeries:
        key = (source, model)
        return SignalSeries(
            dates=tuple(r.trading_day for r in self.rows),
            values=tuple(r.sentiments[key] for r in self.rows),
            source=f"sent:{model}:{source}",
            missing=tuple(r.missing[key] for r in self.rows),
        )


# -- text cleaning -------------------------------------------------------------

_WS_RUN = re.compile(r"\s+")

_MONTHS = {
    name.lower(): i
    for i, name in enumerate(
        (
            "January", "February", "March", "April", "May", "June",
            "July", "August", "September", "October", "November", "December",
        ),
        start=1,
    )
}
_MONTHS.update({name[:3].lower(): num for name, num in list(_MONTHS.items())})
_MONTHS["sept"] = 9

_DATE_PATTERN = re.compile(
    r"(?P<name>[A-Za-z]{3,9})\.?\s+(?P<d1>\d{1,2}),?\s+(?P<y1>\d{4})"
    r"|(?P<y2>\d{4})-(?P<m2>\d{2})-(?P<d2>\d{2})"
    r"|(?P<m3>\d{1,2})/(?P<d3>\d{1,2})/(?P<y3>\d{4})"
)


def clean_article(raw: str, markers: Sequence[str] = DEFAULT_BOILERPLATE_MARKERS) -> str:
    """Drop everything from the earliest boilerplate marker on; collapse whitespace."""
    cut = len(raw)
    for marker in markers:
        pos = raw.find(marker)
        if pos != -1 and pos < cut:
            cut = pos
    return _WS_RUN.sub(" ", raw[:cut]).strip()


def extract_embedded_date(raw: str) -> dt.date | None:
    """First date written as 'May 10, 2024', '2024-05-10', or '05/10/2024'."""
    for m in _DATE_PATTERN.finditer(raw):
        try:
            if m.group("name") is not None:
                month = _MONTHS.get(m.group("name").lower())
                if month is None:
                    continue
                return dt.date(int(m.group("y1")), month, int(m.group("d1")))
            if m.group("y2") is not None:
                return dt.date(int(m.group("y2")), int(m.group("m2")), int(m.group("d2")))
            return dt.date(int(m.group("y3")), int(m.group("m3")), int(m.group("d3")))
        except ValueError:
            continue
    return None


# -- calendar assignment --------------------------------------------------------

def _as_eastern(ts: dt.datetime) -> dt.datetime:
    if ts.tzinfo is None:
        return ts
    return ts.astimezone(EASTERN).replace(tzinfo=None)


def assign_trading_day(ts: dt.datetime, calendar: Sequence[dt.date]) -> dt.date:
    """Effective trading day for an article timestamp.

    At/after the 16:00 ET close, and on weekends, the article rolls to the
    next trading day; otherwise it belongs to its own date when that is a
    trading day, else to the next one.
    """
    if not calendar:
        raise BeyondCalendar("empty trading calendar")
    cal = sorted(calendar)
    local = _as_eastern(ts)
    base = local.date()
    roll_forward = local.time() >= MARKET_CLOSE or base.weekday() >= 5
    if roll_forward:
        i = bisect_right(cal, base)
    else:
        i = bisect_left(cal, base)
    if i >= len(cal):
        raise BeyondCalendar(f"no trading day on or after {base.isoformat()}")
    return cal[i]


# -- daily voting ----------------------------------------------------------------

def vote_daily(records: Sequence[SentimentRecord], trading_day: dt.date) -> DailySentiment:
    """Mode vote over one (day, source, model) group.

    Ties go to the chronologically first record's label when it is among the
    tied classes, otherwise to neutral.
    """
    if not records:
        raise EmptyGroup(f"no sentiment records for {trading_day.isoformat()}")
    counts: dict[int, int] = {}
    for r in records:
        counts[r.label] = counts.get(r.label, 0) + 1
    first_label = min(records, key=lambda r: r.timestamp).label
    top = max(counts.values())
    tied = sorted(c for c, n in counts.items() if n == top)
    if len(tied) == 1:
        label = tied[0]
    elif first_label in tied:
        label = first_label
    else:
        label = 0
    return DailySentiment(
        trading_day=trading_day,
        source=records[0].source,
        model=records[0].model,
        label=label,
        vote_counts=counts,
        first_label=first_label,
    )


def daily_sentiments(
    records: Iterable[SentimentRecord], calendar: Sequence[dt.date]
) -> dict[tuple[str, str], dict[dt.date, DailySentiment]]:
    """Group records by (source, model) and effective trading day, then vote.

    Records falling beyond the calendar's last trading day are skipped; they
    cannot predict any day inside the evaluation span.
    """
    grouped: dict[tuple[str, str], dict[dt.date, list[SentimentRecord]]] = {}
    for r in records:
        try:
            day = assign_trading_day(r.timestamp, calendar)
        except BeyondCalendar:
            continue
        grouped.setdefault((r.source, r.model), {}).setdefault(day, []).append(r)
    out: dict[tuple[str, str], dict[dt.date, DailySentiment]] = {}
    for key, by_day in grouped.items():
        out[key] = {day: vote_daily(recs, day) for day, recs in sorted(by_day.items())}
    return out


# -- lagged join ------------------------------------------------------------------

def join_sentiment_returns(
    daily: Mapping[tuple[str, str], Mapping[dt.date, DailySentiment]],
    classes: ClassSeries,
    k: int,
    calendar: Sequence[dt.date] | None = None,
) -> AlignedDataset:
    """Pair each class day with the sentiment from k trading days earlier.

    One row per class day; when the k-shifted day falls before the calendar
    or has no sentiment, the label is neutral and flagged missing. Positions
    are counted on the full trading calendar (pass the price calendar so the
    first return day can see sentiment from the first bar day).
    """
    if k not in (0, 1, 2):
        raise LagOutOfRange(f"lag must be 0, 1, or 2, got {k}")
    cal = sorted(calendar) if calendar is not None else list(classes.dates)
    pos = {d: i for i, d in enumerate(cal)}
    keys = tuple(sorted(daily.keys()))
    rows: list[AlignedRow] = []
    for day, cls in zip(classes.dates, classes.classes):
        if day not in pos:
            raise DataError(f"class day {day.isoformat()} not in trading calendar")
        i = pos[day] - k
        sent_day = cal[i] if i >= 0 else None
        sentiments: dict[tuple[str, str], int] = {}
        missing: dict[tuple[str, str], bool] = {}
        for key in keys:
            rec = daily[key].get(sent_day) if sent_day is not None else None
            if rec is None:
                sentiments[key] = 0
                missing[key] = True
            else:
                sentiments[key] = rec.label
                missing[key] = False
        rows.append(AlignedRow(day, cls, sentiments, missing))
    return AlignedDataset(tuple(rows), lag=k, keys=keys)


# -- CSV contracts -----------------------------------------------------------------

def _parse_timestamp(raw: str) -> dt.datetime | None:
    raw = raw.strip()
    try:
        return dt.datetime.fromisoformat(raw)
    except ValueError:
        return None


def parse_news_csv(text: str) -> list[NewsArticle]:
    """Read the news contract: timestamp_et,source,title,text (RFC-4180 quoting).

    Unparsable timestamps are preserved as None for downstream repair from
    dates embedded in the article text; unknown sources abort.
    """
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MissingColumn("empty document: no header row") from None
    missing = [c for c in NEWS_COLUMNS if c not in header]
    if missing:
        raise MissingColumn(f"missing column(s): {', '.join(missing)}")
    idx = {c: header.index(c) for c in NEWS_COLUMNS}
    articles: list[NewsArticle] = []
    for row_no, row in enumerate(reader, start=1):
        if not row:
            continue
        source = row[idx["source"]].strip()
        if source not in SOURCES:
            raise DataError(f"row {row_no}: unknown source {source!r}")
        articles.append(
            NewsArticle(
                timestamp=_parse_timestamp(row[idx["timestamp_et"]]),
                source=source,
                title=row[idx["title"]],
                text=row[idx["text"]],
            )
        )
    return articles


@dataclass
class CleanStats:
    dropped_keyword: int = 0
    dropped_no_timestamp: int = 0
    repaired_timestamp: int = 0
    kept: int = 0
    drop_keywords: tuple[str, ...] = field(default=DEFAULT_DROP_KEYWORDS)


def clean_news(
    articles: Iterable[NewsArticle],
    markers: Sequence[str] = DEFAULT_BOILERPLATE_MARKERS,
    drop_keywords: Sequence[str] = DEFAULT_DROP_KEYWORDS,
) -> tuple[list[NewsArticle], CleanStats]:
    """Apply keyword drops, timestamp repair from embedded dates, and text cleaning."""
    stats = CleanStats(drop_keywords=tuple(drop_keywords))
    cleaned: list[NewsArticle] = []
    for art in articles:
        blob = f"{art.title}\n{art.text}"
        if any(kw in blob for kw in drop_keywords):
            stats.dropped_keyword += 1
            continue
        ts = art.timestamp
        if ts is None:
            embedded = extract_embedded_date(art.text) or extract_embedded_date(art.title)
            if embedded is None:
                stats.dropped_no_timestamp += 1
                continue
            ts = dt.datetime.combine(embedded, dt.time(0, 0))
            stats.repaired_timestamp += 1
        cleaned.append(
            NewsArticle(
                timestamp=ts,
                source=art.source,
                title=clean_article(art.title, markers),
                text=clean_article(art.text, markers),
            )
        )
        stats.kept += 1
    return cleaned, stats


def news_to_csv(articles: Iterable[NewsArticle]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(NEWS_COLUMNS)
    for a in articles:
        ts = a.timestamp.isoformat(sep=" ") if a.timestamp is not None else ""
        writer.writerow([ts, a.source, a.title, a.text])
    return buf.getvalue()


def parse_sentiment_csv(text: str) -> list[SentimentRecord]:
    """Read the scorer contract: timestamp_et,source,model,label,score."""
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MissingColumn("empty document: no header row") from None
    missing = [c for c in SENTIMENT_COLUMNS if c not in header]
    if missing:
        raise MissingColumn(f"missing column(s): {', '.join(missing)}")
    idx = {c: header.index(c) for c in SENTIMENT_COLUMNS}
    records: list[SentimentRecord] = []
    for row_no, row in enumerate(reader, start=1):
        if not row:
            continue
        ts = _parse_timestamp(row[idx["timestamp_et"]])
        if ts is None:
            raise DataError(f"row {row_no}: unparsable timestamp {row[idx['timestamp_et']]!r}")
        source = row[idx["source"]].strip()
        if source not in SOURCES:
            raise DataError(f"row {row_no}: unknown source {source!r}")
        model = row[idx["model"]].strip().lower()
        if model not in MODELS:
            raise DataError(f"row {row_no}: unknown model {row[idx['model']]!r}")
        try:
            label = int(row[idx["label"]])
        except ValueError:
            raise DataError(f"row {row_no}: unparsable label {row[idx['label']]!r}") from None
        if label not in (-1, 0, 1):
            raise DataError(f"row {row_no}: label {label} outside {{-1,0,+1}}")
        raw_score = row[idx["score"]].strip()
        score: float | None = None
        if raw_score:
            try:
                score = float(raw_score)
            except ValueError:
                raise DataError(f"row {row_no}: unparsable score {raw_score!r}") from None
            if not 0.0 <= score <= 1.0:
                raise DataError(f"row {row_no}: score {score} outside [0, 1]")
        records.append(SentimentRecord(ts, source, model, label, score))
    return records
