"""Shared forecast result type."""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ForecastResult:
    date: dt.date | None
    point_forecast: float
    model: str

    def __post_init__(self) -> None:
        if not math.isfinite(self.point_forecast):
            raise ValueError(f"non-finite forecast from {self.model}: {self.point_forecast}")
