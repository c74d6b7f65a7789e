"""Dated discrete trading signals shared by indicators, forecasters, and news."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

ALLOWED_SIGNALS = (-1, 0, 1)


@dataclass(frozen=True)
class SignalSeries:
    """Sequence of (date, signal) from one source; signals are -1, 0, or +1.

    ``missing`` flags days whose signal was substituted (no data, failed fit);
    it is None for sources that always emit a computed value.
    """

    dates: tuple[dt.date, ...]
    values: tuple[int, ...]
    source: str
    missing: tuple[bool, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.values):
            raise ValueError("dates and values length mismatch")
        if self.missing is not None and len(self.missing) != len(self.values):
            raise ValueError("missing flags length mismatch")
        bad = [v for v in self.values if v not in ALLOWED_SIGNALS]
        if bad:
            raise ValueError(f"signal values outside {{-1,0,+1}}: {bad[:3]}")

    def __len__(self) -> int:
        return len(self.dates)

    def as_dict(self) -> dict[dt.date, int]:
        return dict(zip(self.dates, self.values))

    def window(self, start: dt.date | None, end: dt.date | None) -> "SignalSeries":
        kept = [
            i
            for i, d in enumerate(self.dates)
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        return SignalSeries(
            tuple(self.dates[i] for i in kept),
            tuple(self.values[i] for i in kept),
            self.source,
            tuple(self.missing[i] for i in kept) if self.missing is not None else None,
        )
