"""Signal fusion and the all-in/all-out portfolio simulation.

The combined daily signal is the sign of the component sum; a zero sum means
hold. A positive signal converts all cash into (fractional) shares at that
day's adjusted close, a negative signal converts all shares back to cash,
and zero carries the state. Trades are costless by default; the ``cost``
fraction exists for sensitivity runs and stays at zero for benchmark
comparisons. Portfolio value is marked to market daily as cash + shares *
price.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidComponent, SignalPriceMismatch, TooShort
from .market_data import PriceSeries
from .signals import SignalSeries


@dataclass(frozen=True)
class CombinedSignal:
    date: dt.date
    components: Mapping[str, int]
    value: int  # the fused signal


@dataclass(frozen=True)
class PortfolioState:
    date: dt.date
    cash: float
    shares: float
    price: float

    @property
    def value(self) -> float:
        return self.cash + self.shares * self.price


@dataclass(frozen=True)
class EquityCurve:
    states: tuple[PortfolioState, ...]
    initial_capital: float

    def __len__(self) -> int:
        return len(self.states)

    def dates(self) -> tuple[dt.date, ...]:
        return tuple(s.date for s in self.states)

    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.states])

    def returns(self) -> np.ndarray:
        return (self.values() - self.initial_capital) / self.initial_capital


def combine_signals(components: Mapping[str, int], date: dt.date) -> CombinedSignal:
    """Fuse component signals into the sign of their sum (0 on a zero sum)."""
    for name, value in components.items():
        if value not in (-1, 0, 1):
            raise InvalidComponent(f"component {name!r} has signal {value!r}")
    total = sum(components.values())
    fused = 0 if total == 0 else (1 if total > 0 else -1)
    return CombinedSignal(date=date, components=dict(components), value=fused)


def _signal_by_date(
    signals: Sequence[CombinedSignal] | SignalSeries,
) -> dict[dt.date, int]:
    if isinstance(signals, SignalSeries):
        return signals.as_dict()
    return {s.date: s.value for s in signals}


def simulate(
    prices: PriceSeries,
    signals: Sequence[CombinedSignal] | SignalSeries,
    initial_capital: float = 10_000.0,
    cost: float = 0.0,
) -> EquityCurve:
    """Replay signals over the price window; one signal per trading day."""
    if initial_capital <= 0:
        raise ValueError(f"initial capital must be positive, got {initial_capital}")
    by_date = _signal_by_date(signals)
    window_dates = prices.dates()
    missing = [d for d in window_dates if d not in by_date]
    extra = [d for d in by_date if d not in window_dates]
    if missing or extra:
        raise SignalPriceMismatch(
            f"{len(missing)} window day(s) lack signals, {len(extra)} signal day(s) lack prices"
        )

    cash = float(initial_capital)
    shares = 0.0
    states: list[PortfolioState] = []
    for bar in prices.bars:
        signal = by_date[bar.date]
        price = bar.adj_close
        if signal > 0 and cash > 0:
            shares = cash * (1.0 - cost) / price
            cash = 0.0
        elif signal < 0 and shares > 0:
            cash = shares * price * (1.0 - cost)
            shares = 0.0
        states.append(PortfolioState(date=bar.date, cash=cash, shares=shares, price=price))
    return EquityCurve(states=tuple(states), initial_capital=initial_capital)


def buy_and_hold(prices: PriceSeries, initial_capital: float = 10_000.0) -> EquityCurve:
    """Buy at the first bar's adjusted close and never trade."""
    if len(prices) < 2:
        raise TooShort(f"need at least 2 bars, got {len(prices)}")
    first = prices.bars[0].adj_close
    shares = initial_capital / first
    states = tuple(
        PortfolioState(date=b.date, cash=0.0, shares=shares, price=b.adj_close)
        for b in prices.bars
    )
    return EquityCurve(states=states, initial_capital=initial_capital)


def strategy_return(curve: EquityCurve) -> float:
    """Final mark-to-market return (V_final - C0) / C0."""
    if not curve.states:
        raise ValueError("empty equity curve")
    return (curve.states[-1].value - curve.initial_capital) / curve.initial_capital


def cash_return(curve: EquityCurve) -> float:
    """Cash-only return; degenerate while shares are held (reported for comparison)."""
    if not curve.states:
        raise ValueError("empty equity curve")
    return (curve.states[-1].cash - curve.initial_capital) / curve.initial_capital
