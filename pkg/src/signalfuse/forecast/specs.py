"""Model-spec strings for the CLI config.

Grammar:
  arima(p,d,q) | arima(auto)
  ets(error,trend,seasonal[,period])
  prophet([cp=N][,fourier=P:N[+P:N...]][,lambda=X])

Examples: arima(1,0,0)  ets(add,none,none)  prophet(cp=25,fourier=5:3,lambda=0.5)
"""
from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .arima import ArimaModel, arima_fit, arima_forecast, select_arima_order
from .base import ForecastResult
from .ets import EtsModel, EtsSpec, ets_fit, ets_forecast
from .prophet_lite import DEFAULT_FOURIER, ProphetLiteModel, prophet_lite_fit, prophet_lite_forecast

_SPEC_RE = re.compile(r"^\s*(arima|ets|prophet)\s*\(\s*([^)]*)\s*\)\s*$")


@dataclass(frozen=True)
class ArimaForecaster:
    order: tuple[int, int, int] | None  # None selects by AIC at each fit

    @property
    def name(self) -> str:
        if self.order is None:
            return "arima(auto)"
        return f"arima({self.order[0]},{self.order[1]},{self.order[2]})"

    def fit(self, values: np.ndarray) -> ArimaModel:
        order = self.order if self.order is not None else select_arima_order(values)
        return arima_fit(values, order)

    def forecast(self, model: ArimaModel, values: np.ndarray, date: dt.date) -> ForecastResult:
        return arima_forecast(model, values, date)


@dataclass(frozen=True)
class EtsForecaster:
    spec: EtsSpec

    @property
    def name(self) -> str:
        return self.spec.tag

    def fit(self, values: np.ndarray) -> EtsModel:
        return ets_fit(values, self.spec)

    def forecast(self, model: EtsModel, values: np.ndarray, date: dt.date) -> ForecastResult:
        n_fit = model.warmup + model.fitted.size
        h = values.size - n_fit + 1  # stale models project further ahead
        return ets_forecast(model, h, date)


@dataclass(frozen=True)
class ProphetForecaster:
    n_changepoints: int = 25
    fourier: tuple[tuple[float, int], ...] = DEFAULT_FOURIER
    ridge: float = 0.5

    @property
    def name(self) -> str:
        blocks = "+".join(f"{p:g}:{n}" for p, n in self.fourier)
        return f"prophet(cp={self.n_changepoints},fourier={blocks},lambda={self.ridge:g})"

    def fit(self, values: np.ndarray) -> ProphetLiteModel:
        return prophet_lite_fit(None, values, self.n_changepoints, self.fourier, self.ridge)

    def forecast(
        self, model: ProphetLiteModel, values: np.ndarray, date: dt.date
    ) -> ForecastResult:
        steps = values.size - model.n_train + 1
        return prophet_lite_forecast(model, date, steps_ahead=steps)


Forecaster = ArimaForecaster | EtsForecaster | ProphetForecaster


def _parse_fourier(raw: str) -> tuple[tuple[float, int], ...]:
    blocks = []
    for part in raw.split("+"):
        m = re.match(r"^\s*([0-9.]+)\s*:\s*(\d+)\s*$", part)
        if not m:
            raise ConfigError(f"bad fourier block {part!r}; expected P:N")
        blocks.append((float(m.group(1)), int(m.group(2))))
    return tuple(blocks)


def parse_model_spec(text: str) -> Forecaster:
    m = _SPEC_RE.match(text)
    if not m:
        raise ConfigError(f"unparsable model spec {text!r}")
    family, body = m.group(1), m.group(2)
    args = [a.strip() for a in body.split(",")] if body.strip() else []

    if family == "arima":
        if args == ["auto"]:
            return ArimaForecaster(order=None)
        if len(args) != 3:
            raise ConfigError(f"arima spec needs (p,d,q) or (auto), got {text!r}")
        try:
            p, d, q = (int(a) for a in args)
        except ValueError:
            raise ConfigError(f"non-integer arima order in {text!r}") from None
        if min(p, d, q) < 0:
            raise ConfigError(f"negative arima order in {text!r}")
        return ArimaForecaster(order=(p, d, q))

    if family == "ets":
        if len(args) not in (3, 4):
            raise ConfigError(f"ets spec needs (error,trend,seasonal[,period]), got {text!r}")
        period = 1
        if len(args) == 4:
            try:
                period = int(args[3])
            except ValueError:
                raise ConfigError(f"non-integer ets period in {text!r}") from None
        try:
            spec = EtsSpec(error=args[0], trend=args[1], seasonal=args[2], period=period)
        except ValueError as exc:
            raise ConfigError(f"bad ets spec {text!r}: {exc}") from None
        return EtsForecaster(spec=spec)

    # prophet
    cp, fourier, ridge = 25, DEFAULT_FOURIER, 0.5
    for arg in args:
        if "=" not in arg:
            raise ConfigError(f"prophet spec arguments must be key=value, got {arg!r}")
        key, _, val = arg.partition("=")
        key = key.strip()
        try:
            if key == "cp":
                cp = int(val)
            elif key == "fourier":
                fourier = _parse_fourier(val)
            elif key == "lambda":
                ridge = float(val)
            else:
                raise ConfigError(f"unknown prophet option {key!r}")
        except ValueError:
            raise ConfigError(f"bad prophet option value {arg!r}") from None
    return ProphetForecaster(n_changepoints=cp, fourier=fourier, ridge=ridge)
