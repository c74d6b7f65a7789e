from .base import ForecastResult
from .arima import ArimaModel, arima_fit, arima_forecast, difference, select_arima_order
from .ets import EtsModel, EtsSpec, ets_fit, ets_forecast
from .prophet_lite import ProphetLiteModel, prophet_lite_fit, prophet_lite_forecast
from .specs import parse_model_spec
from .walkforward import WalkForwardResult, walk_forward, walk_forward_signals

__all__ = [
    "ForecastResult",
    "ArimaModel",
    "arima_fit",
    "arima_forecast",
    "difference",
    "select_arima_order",
    "EtsModel",
    "EtsSpec",
    "ets_fit",
    "ets_forecast",
    "ProphetLiteModel",
    "prophet_lite_fit",
    "prophet_lite_forecast",
    "parse_model_spec",
    "WalkForwardResult",
    "walk_forward",
    "walk_forward_signals",
]
