"""Daily-bar backtesting engine fusing news sentiment, technical indicators,
and time-series forecasts into an all-in/all-out index trading strategy."""

__version__ = "0.1.0"
