"""Decomposable trend + Fourier-seasonality forecaster.

The trend is piecewise linear over evenly spaced changepoints covering the
first 80% of the training range, with per-changepoint slope adjustments and
offsets constructed so the trend stays continuous. Seasonality is a Fourier
expansion per (period, order) block on the trading-day index. The fit is a
ridge-regularized least squares: only the slope adjustments are penalized.
There is no holiday component. Rank-deficient designs are reported via a
warning and solved with the pseudo-inverse (minimum-norm solution).
"""
from __future__ import annotations

import datetime as dt
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import TooShort
from .base import ForecastResult

DEFAULT_FOURIER = ((5, 3),)  # one weekly block on the trading-day index


@dataclass(frozen=True)
class FourierBlock:
    period: float
    order: int
    cos_coef: tuple[float, ...]
    sin_coef: tuple[float, ...]


@dataclass(frozen=True)
class ProphetLiteModel:
    base_rate: float  # k
    offset: float  # m
    changepoints: tuple[float, ...]
    deltas: tuple[float, ...]
    gammas: tuple[float, ...]
    fourier: tuple[FourierBlock, ...]
    ridge: float
    n_train: int
    train_dates: tuple[dt.date, ...] | None
    rank_deficient: bool

    @property
    def tag(self) -> str:
        blocks = "+".join(f"{b.period:g}:{b.order}" for b in self.fourier)
        return f"prophet(cp={len(self.changepoints)},fourier={blocks},lambda={self.ridge:g})"

    def trend_at(self, t) -> np.ndarray:
        """Piecewise-linear trend via active-changepoint slopes and offsets."""
        t = np.asarray(t, dtype=float)
        cp = np.asarray(self.changepoints)
        active = t[..., None] >= cp  # a(t)
        slope = self.base_rate + active @ np.asarray(self.deltas)
        intercept = self.offset + active @ np.asarray(self.gammas)
        return slope * t + intercept

    def seasonal_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for block in self.fourier:
            for n in range(1, block.order + 1):
                ang = 2.0 * np.pi * n * t / block.period
                out = out + block.cos_coef[n - 1] * np.cos(ang) + block.sin_coef[n - 1] * np.sin(ang)
        return out

    def predict_at(self, t) -> np.ndarray:
        return self.trend_at(t) + self.seasonal_at(t)


def _design(
    t: np.ndarray, changepoints: np.ndarray, fourier: Sequence[tuple[float, int]]
) -> np.ndarray:
    cols = [np.ones_like(t), t]
    for s in changepoints:
        cols.append(np.maximum(t - s, 0.0))
    for period, order in fourier:
        for n in range(1, order + 1):
            ang = 2.0 * np.pi * n * t / period
            cols.append(np.cos(ang))
            cols.append(np.sin(ang))
    return np.column_stack(cols)


def prophet_lite_fit(
    dates: Sequence[dt.date] | None,
    values,
    n_changepoints: int = 25,
    fourier: Sequence[tuple[float, int]] = DEFAULT_FOURIER,
    ridge: float = 0.5,
) -> ProphetLiteModel:
    """Fit on the trading-day index 0..n-1 of ``values``.

    ``dates`` (when given) must parallel ``values`` and is retained so
    in-sample dates can be looked up at forecast time.
    """
    y = np.asarray(values, dtype=float)
    n = y.size
    n_fourier = sum(2 * order for _, order in fourier)
    need = 2 * (n_changepoints + n_fourier)
    if n < need:
        raise TooShort(f"need at least {need} observations, got {n}")
    if dates is not None and len(dates) != n:
        raise ValueError("dates and values length mismatch")

    t = np.arange(n, dtype=float)
    changepoints = np.linspace(0.0, 0.8 * (n - 1), n_changepoints + 1)[1:]
    X = _design(t, changepoints, fourier)
    n_cols = X.shape[1]

    # Ridge on the changepoint slope adjustments only, via row augmentation.
    penalty = np.zeros((n_changepoints, n_cols))
    for j in range(n_changepoints):
        penalty[j, 2 + j] = np.sqrt(ridge)
    A = np.vstack([X, penalty])
    rhs = np.concatenate([y, np.zeros(n_changepoints)])
    beta, _, rank, _ = np.linalg.lstsq(A, rhs, rcond=None)
    rank_deficient = rank < n_cols
    if rank_deficient:
        warnings.warn(
            f"rank-deficient design ({rank}/{n_cols}); using minimum-norm solution",
            RuntimeWarning,
            stacklevel=2,
        )

    m, k = float(beta[0]), float(beta[1])  # columns are [1, t, ...]
    deltas = tuple(float(v) for v in beta[2 : 2 + n_changepoints])
    gammas = tuple(-s * d for s, d in zip(changepoints, deltas))
    blocks: list[FourierBlock] = []
    pos = 2 + n_changepoints
    for period, order in fourier:
        cos_c, sin_c = [], []
        for _ in range(order):
            cos_c.append(float(beta[pos]))
            sin_c.append(float(beta[pos + 1]))
            pos += 2
        blocks.append(FourierBlock(float(period), int(order), tuple(cos_c), tuple(sin_c)))

    return ProphetLiteModel(
        base_rate=k,
        offset=m,
        changepoints=tuple(float(s) for s in changepoints),
        deltas=deltas,
        gammas=gammas,
        fourier=tuple(blocks),
        ridge=ridge,
        n_train=n,
        train_dates=tuple(dates) if dates is not None else None,
        rank_deficient=rank_deficient,
    )


def _weekdays_after(last: dt.date, target: dt.date) -> int:
    steps = 0
    cur = last
    while cur < target:
        cur += dt.timedelta(days=1)
        if cur.weekday() < 5:
            steps += 1
    return max(steps, 1)


def prophet_lite_forecast(
    model: ProphetLiteModel,
    date: dt.date | None = None,
    steps_ahead: int | None = None,
) -> ForecastResult:
    """Evaluate trend + seasonality at an in-sample date or beyond the end.

    Out-of-sample the index advances by ``steps_ahead`` (default: weekday
    count between the last training date and the target, minimum one step);
    the final-segment slope extends the trend.
    """
    if steps_ahead is not None:
        idx = model.n_train - 1 + steps_ahead
    elif date is not None and model.train_dates:
        last = model.train_dates[-1]
        if date <= last:
            try:
                idx = model.train_dates.index(date)
            except ValueError:
                raise ValueError(f"{date.isoformat()} is not a training date") from None
        else:
            idx = model.n_train - 1 + _weekdays_after(last, date)
    else:
        idx = model.n_train  # one step ahead
    value = float(model.predict_at(np.asarray([float(idx)]))[0])
    return ForecastResult(date=date, point_forecast=value, model=model.tag)
