"""Expanding-window one-step-ahead signal generation.

For each test day the model trains on all returns strictly before that day
(reused between refits per ``refit_every``), produces a point forecast, and
the forecast maps to a class signal with the same thresholds used to label
realized returns. A failed fit contributes a neutral signal and a recorded
diagnostic rather than aborting the walk.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, InsufficientHistory, SignalFuseError
from ..market_data import DEFAULT_THRESHOLDS, ClassThresholds, ReturnSeries, classify_return
from ..signals import SignalSeries
from .base import ForecastResult
from .specs import Forecaster, parse_model_spec


@dataclass(frozen=True)
class WalkForwardResult:
    signals: SignalSeries
    forecasts: tuple[ForecastResult, ...]
    failures: tuple[tuple[dt.date, str], ...]


def walk_forward(
    returns: ReturnSeries,
    model_spec: str | Forecaster,
    test_window: tuple[dt.date | None, dt.date | None],
    refit_every: int = 1,
    min_train: int = 200,
    thresholds: ClassThresholds = DEFAULT_THRESHOLDS,
) -> WalkForwardResult:
    spec = parse_model_spec(model_spec) if isinstance(model_spec, str) else model_spec
    if refit_every < 1:
        raise ValueError(f"refit_every must be >= 1, got {refit_every}")
    values = returns.to_array()
    dates = returns.dates
    start, end = test_window
    test_idx = [
        i
        for i, d in enumerate(dates)
        if (start is None or d >= start) and (end is None or d <= end)
    ]
    if not test_idx:
        raise DataError("test window contains no return dates")
    if test_idx[0] < min_train:
        raise InsufficientHistory(
            f"first test day {dates[test_idx[0]].isoformat()} has "
            f"{test_idx[0]} training returns, need {min_train}"
        )

    model = None
    since_refit = 0
    out_dates: list[dt.date] = []
    out_values: list[int] = []
    out_missing: list[bool] = []
    forecasts: list[ForecastResult] = []
    failures: list[tuple[dt.date, str]] = []

    for i in test_idx:
        day = dates[i]
        history = values[:i]
        try:
            if model is None or since_refit >= refit_every:
                model = spec.fit(history)
                since_refit = 0
            result = spec.forecast(model, history, day)
            forecasts.append(result)
            out_values.append(classify_return(result.point_forecast, thresholds.pos, thresholds.neg))
            out_missing.append(False)
        except (SignalFuseError, ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            failures.append((day, f"{type(exc).__name__}: {exc}"))
            out_values.append(0)
            out_missing.append(True)
            model = None  # force a refit attempt next day
        since_refit += 1
        out_dates.append(day)

    signals = SignalSeries(
        dates=tuple(out_dates),
        values=tuple(out_values),
        source=spec.name,
        missing=tuple(out_missing),
    )
    return WalkForwardResult(
        signals=signals, forecasts=tuple(forecasts), failures=tuple(failures)
    )


def walk_forward_signals(
    returns: ReturnSeries,
    model_spec: str | Forecaster,
    test_window: tuple[dt.date | None, dt.date | None],
    refit_every: int = 1,
    min_train: int = 200,
    thresholds: ClassThresholds = DEFAULT_THRESHOLDS,
) -> SignalSeries:
    return walk_forward(returns, model_spec, test_window, refit_every, min_train, thresholds).signals
