"""EMA-family technical indicators and their signal mappings.

Warm-up convention: every indicator array is aligned to its input and carries
NaN where the value is undefined. EMA seeds with the simple mean of the first
``period`` values at index ``period - 1``; recursion weight is 2/(period+1).

Signal rules (see ``signalize``):
  macd_state      +1/-1 by MACD line vs. signal line level, 0 on exact tie
  macd_cross      +/-1 only on the crossing day, else 0
  sar_side        +1 when close is above the stop-and-reverse level, else -1
  vw_state        macd_state applied to the volume-weighted variant
  vw_price_level  +1 when close is above the slow volume-weighted EMA, else -1
  passthrough     identity on an existing {-1,0,+1} stream
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import PeriodTooLong, SeriesTooShort, UnknownRule, ZeroVolumeWindow
from .market_data import PriceSeries
from .signals import SignalSeries

SIGNAL_RULES = (
    "macd_state",
    "macd_cross",
    "sar_side",
    "vw_state",
    "vw_price_level",
    "passthrough",
)


@dataclass(frozen=True)
class MacdOutput:
    macd_line: np.ndarray
    signal_line: np.ndarray
    histogram: np.ndarray


@dataclass
class SarState:
    sar: float
    ep: float
    alpha: float
    trend: str  # "up" | "down"


def ema(series: Sequence[float] | np.ndarray, period: int) -> np.ndarray:
    """Exponential moving average with SMA seed; NaN before index period-1."""
    x = np.asarray(series, dtype=float)
    if period < 1:
        raise ValueError(f"period must be >= 1, got {period}")
    if x.size < period:
        raise PeriodTooLong(f"period {period} exceeds series length {x.size}")
    alpha = 2.0 / (period + 1)
    out = np.full(x.size, np.nan)
    seed = float(np.mean(x[:period]))
    out[period - 1] = seed
    if x.size > period:
        tail, _ = lfilter(
            [alpha], [1.0, -(1.0 - alpha)], x[period:], zi=np.array([(1.0 - alpha) * seed])
        )
        out[period:] = tail
    return out


def macd(
    close: Sequence[float] | np.ndarray, fast: int = 12, slow: int = 26, signal: int = 9
) -> MacdOutput:
    """MACD line, signal line, and histogram; NaN outside the defined range."""
    x = np.asarray(close, dtype=float)
    if x.size < slow + signal:
        raise SeriesTooShort(f"need at least {slow + signal} closes, got {x.size}")
    line = ema(x, fast) - ema(x, slow)
    sig = np.full(x.size, np.nan)
    defined = slow - 1
    sig[defined:] = ema(line[defined:], signal)
    return MacdOutput(macd_line=line, signal_line=sig, histogram=line - sig)


def volume_weighted_ema(
    close: Sequence[float] | np.ndarray, volume: Sequence[float] | np.ndarray, period: int
) -> np.ndarray:
    """EMA of price*volume over EMA of volume."""
    c = np.asarray(close, dtype=float)
    v = np.asarray(volume, dtype=float)
    if c.size != v.size:
        raise ValueError("close and volume length mismatch")
    if np.any(v < 0):
        raise ValueError("negative volume")
    denom = ema(v, period)
    valid = denom[~np.isnan(denom)]
    if np.any(valid == 0.0):
        raise ZeroVolumeWindow(f"EMA({period}) of volume reaches zero")
    return ema(c * v, period) / denom


def vw_macd(
    close: Sequence[float] | np.ndarray,
    volume: Sequence[float] | np.ndarray,
    fast: int = 12,
    slow: int = 26,
    signal: int = 9,
) -> MacdOutput:
    """MACD built on volume-weighted EMAs."""
    c = np.asarray(close, dtype=float)
    if c.size < slow + signal:
        raise SeriesTooShort(f"need at least {slow + signal} closes, got {c.size}")
    line = volume_weighted_ema(close, volume, fast) - volume_weighted_ema(close, volume, slow)
    sig = np.full(c.size, np.nan)
    defined = slow - 1
    sig[defined:] = ema(line[defined:], signal)
    return MacdOutput(macd_line=line, signal_line=sig, histogram=line - sig)


def parabolic_sar(
    bars: PriceSeries,
    alpha0: float = 0.02,
    alpha_step: float = 0.02,
    alpha_max: float = 0.2,
) -> tuple[np.ndarray, SignalSeries]:
    """Stop-and-reverse level with Wilder acceleration.

    Initial trend is up iff close[1] >= close[0]; the first bar's SAR is that
    trend's opposite extreme (low for up, high for down). The level may not
    enter the prior two bars' range. A flip resets alpha, seeds SAR from the
    old extreme point, and restarts the extreme from the flip bar. Signals
    (+1 if close > SAR else -1) are emitted from the second bar onward.
    """
    n = len(bars)
    if n < 2:
        raise SeriesTooShort(f"need at least 2 bars, got {n}")
    highs, lows, closes = bars.highs(), bars.lows(), bars.closes()
    dates = bars.dates()

    if closes[1] >= closes[0]:
        state = SarState(sar=float(lows[0]), ep=float(highs[0]), alpha=alpha0, trend="up")
    else:
        state = SarState(sar=float(highs[0]), ep=float(lows[0]), alpha=alpha0, trend="down")

    sar = np.empty(n)
    sar[0] = state.sar
    signals: list[int] = []
    for t in range(1, n):
        if state.trend == "up":
            s = state.sar + state.alpha * (state.ep - state.sar)
            s = min(s, lows[t - 1], lows[t - 2] if t >= 2 else lows[t - 1])
            if lows[t] < s:
                s = state.ep
                state = SarState(sar=s, ep=float(lows[t]), alpha=alpha0, trend="down")
            else:
                if highs[t] > state.ep:
                    state.ep = float(highs[t])
                    state.alpha = min(state.alpha + alpha_step, alpha_max)
                state.sar = s
        else:
            s = state.sar - state.alpha * (state.sar - state.ep)
            s = max(s, highs[t - 1], highs[t - 2] if t >= 2 else highs[t - 1])
            if highs[t] > s:
                s = state.ep
                state = SarState(sar=s, ep=float(highs[t]), alpha=alpha0, trend="up")
            else:
                if lows[t] < state.ep:
                    state.ep = float(lows[t])
                    state.alpha = min(state.alpha + alpha_step, alpha_max)
                state.sar = s
        sar[t] = s
        signals.append(1 if closes[t] > s else -1)

    return sar, SignalSeries(dates[1:], tuple(signals), source="sar")


def dual_macd(
    close: Sequence[float] | np.ndarray,
    dates: Sequence[dt.date],
    short_cfg: tuple[int, int, int] = (12, 26, 9),
    long_cfg: tuple[int, int, int] = (19, 39, 9),
) -> SignalSeries:
    """Agreement filter: +1/-1 only when both configurations' histograms share sign."""
    x = np.asarray(close, dtype=float)
    need = long_cfg[1] + long_cfg[2]
    if x.size < need:
        raise SeriesTooShort(f"need at least {need} closes, got {x.size}")
    short = macd(x, *short_cfg).histogram
    long_ = macd(x, *long_cfg).histogram
    defined = ~(np.isnan(short) | np.isnan(long_))
    values = np.zeros(x.size, dtype=int)
    values[defined & (short > 0) & (long_ > 0)] = 1
    values[defined & (short < 0) & (long_ < 0)] = -1
    keep = np.flatnonzero(defined)
    return SignalSeries(
        tuple(dates[i] for i in keep),
        tuple(int(values[i]) for i in keep),
        source="dual_macd",
    )


def _state_values(line: np.ndarray, ref: np.ndarray) -> np.ndarray:
    out = np.zeros(line.size, dtype=int)
    out[line > ref] = 1
    out[line < ref] = -1
    return out


def signalize(
    rule: str,
    dates: Sequence[dt.date],
    *,
    macd_out: MacdOutput | None = None,
    close: Sequence[float] | np.ndarray | None = None,
    sar: np.ndarray | None = None,
    vwema_slow: np.ndarray | None = None,
    labels: Sequence[int] | None = None,
    source: str | None = None,
) -> SignalSeries:
    """Map indicator state (or an existing label stream) to a signal series.

    Emits only dates where the underlying inputs are defined (non-NaN).
    """
    if rule not in SIGNAL_RULES:
        raise UnknownRule(f"unknown signal rule {rule!r}; expected one of {SIGNAL_RULES}")
    tag = source or rule

    if rule in ("macd_state", "vw_state", "macd_cross"):
        if macd_out is None:
            raise ValueError(f"rule {rule} requires macd_out")
        line, sig = macd_out.macd_line, macd_out.signal_line
        defined = ~(np.isnan(line) | np.isnan(sig))
        state = _state_values(line, sig)
        if rule == "macd_cross":
            values = np.zeros(line.size, dtype=int)
            idx = np.flatnonzero(defined)
            for prev, cur in zip(idx[:-1], idx[1:]):
                if state[prev] <= 0 and state[cur] > 0:
                    values[cur] = 1
                elif state[prev] >= 0 and state[cur] < 0:
                    values[cur] = -1
        else:
            values = state
        keep = np.flatnonzero(defined)
    elif rule == "sar_side":
        if close is None or sar is None:
            raise ValueError("rule sar_side requires close and sar")
        c = np.asarray(close, dtype=float)
        defined = ~np.isnan(sar)
        values = np.where(c > sar, 1, -1)
        keep = np.flatnonzero(defined)
    elif rule == "vw_price_level":
        if close is None or vwema_slow is None:
            raise ValueError("rule vw_price_level requires close and vwema_slow")
        c = np.asarray(close, dtype=float)
        defined = ~np.isnan(vwema_slow)
        values = np.where(c > vwema_slow, 1, -1)
        keep = np.flatnonzero(defined)
    else:  # passthrough
        if labels is None:
            raise ValueError("rule passthrough requires labels")
        return SignalSeries(tuple(dates), tuple(int(v) for v in labels), source=tag)

    return SignalSeries(
        tuple(dates[i] for i in keep),
        tuple(int(values[i]) for i in keep),
        source=tag,
    )
