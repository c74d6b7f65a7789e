"""Shared test construction helpers."""
import datetime as dt

from signalfuse.market_data import PriceBar, PriceSeries


def make_series(adj_closes, start=dt.date(2024, 1, 1), volumes=None):
    """Weekday-dated price series with OHLC wrapped around the given closes."""
    bars = []
    day = start
    for i, v in enumerate(adj_closes):
        while day.weekday() >= 5:
            day += dt.timedelta(days=1)
        volume = 1000 if volumes is None else volumes[i]
        bars.append(PriceBar(day, v, v * 1.01, v * 0.99, v, v, volume))
        day += dt.timedelta(days=1)
    return PriceSeries(tuple(bars))
