import datetime as dt

import numpy as np
import pytest

from signalfuse.errors import TooShort
from signalfuse.forecast.prophet_lite import (
    prophet_lite_fit,
    prophet_lite_forecast,
)

from helpers import make_series


def r_squared(y, fitted):
    resid = y - fitted
    total = y - np.mean(y)
    return 1.0 - np.dot(resid, resid) / np.dot(total, total)


class TestFit:
    def test_pure_line_recovers_slope_and_offset(self):
        t = np.arange(500, dtype=float)
        y = 1.0 + 2.0 * t
        model = prophet_lite_fit(None, y, n_changepoints=25, fourier=(), ridge=0.5)
        assert model.base_rate == pytest.approx(2.0, abs=1e-6)
        assert model.offset == pytest.approx(1.0, abs=1e-4)
        assert max(abs(d) for d in model.deltas) < 1e-6

    def test_pure_sinusoid_recovery(self):
        t = np.arange(400, dtype=float)
        y = 3.0 * np.cos(2 * np.pi * t / 5.0) + 1.5 * np.sin(2 * np.pi * t / 5.0)
        model = prophet_lite_fit(None, y, n_changepoints=25, fourier=((5, 2),), ridge=0.5)
        assert model.fourier[0].cos_coef[0] == pytest.approx(3.0, abs=1e-3)
        assert model.fourier[0].sin_coef[0] == pytest.approx(1.5, abs=1e-3)
        assert abs(model.base_rate) < 1e-3
        fitted = model.predict_at(t)
        assert r_squared(y, fitted) >= 0.99

    def test_constant_series(self):
        y = np.full(200, 4.25)
        model = prophet_lite_fit(None, y, fourier=())
        assert abs(model.base_rate) < 1e-8
        assert model.offset == pytest.approx(4.25, abs=1e-6)

    def test_trend_continuous_at_changepoints(self):
        rng = np.random.default_rng(42)
        y = np.cumsum(rng.normal(0.1, 1.0, 300))
        model = prophet_lite_fit(None, y, fourier=((5, 2),))
        deltas = np.asarray(model.deltas)
        gammas = np.asarray(model.gammas)
        for j, s in enumerate(model.changepoints):
            # Left limit uses changepoints < j, right limit includes j.
            left = (model.base_rate + deltas[:j].sum()) * s + model.offset + gammas[:j].sum()
            right = (
                (model.base_rate + deltas[: j + 1].sum()) * s
                + model.offset
                + gammas[: j + 1].sum()
            )
            assert right == pytest.approx(left, abs=1e-9)

    def test_default_fourier_is_rank_deficient_but_solved(self):
        # Order 3 on a period-5 integer grid aliases into order 2: the design
        # loses rank and the minimum-norm solution is used.
        t = np.arange(300, dtype=float)
        y = 2.0 * np.sin(2 * np.pi * t / 5.0) + 0.01 * t
        with pytest.warns(RuntimeWarning, match="rank-deficient"):
            model = prophet_lite_fit(None, y)
        assert model.rank_deficient
        assert r_squared(y, model.predict_at(t)) >= 0.99

    def test_too_short(self):
        with pytest.raises(TooShort):
            prophet_lite_fit(None, np.ones(40), n_changepoints=25, fourier=())


class TestForecast:
    def test_zero_seasonality_linear_extrapolation(self):
        t = np.arange(300, dtype=float)
        y = 5.0 + 0.5 * t
        model = prophet_lite_fit(None, y, fourier=())
        out = prophet_lite_forecast(model, steps_ahead=5)
        assert out.point_forecast == pytest.approx(5.0 + 0.5 * 304, rel=1e-6)

    def test_in_sample_date_equals_fitted(self):
        dates = make_series([100.0] * 200).dates()
        t = np.arange(200, dtype=float)
        y = 1.0 + 0.1 * t
        model = prophet_lite_fit(dates, y, fourier=())
        out = prophet_lite_forecast(model, date=dates[50])
        assert out.point_forecast == pytest.approx(float(model.predict_at([50.0])[0]))

    def test_sinusoid_one_step_out(self):
        t = np.arange(400, dtype=float)
        y = 10.0 + 3.0 * np.sin(2 * np.pi * t / 5.0 + 0.7)
        model = prophet_lite_fit(None, y, fourier=((5, 2),))
        out = prophet_lite_forecast(model, steps_ahead=1)
        truth = 10.0 + 3.0 * np.sin(2 * np.pi * 400 / 5.0 + 0.7)
        assert out.point_forecast == pytest.approx(truth, rel=0.02)

    def test_future_date_advances_by_weekdays(self):
        dates = make_series([100.0] * 100).dates()
        t = np.arange(100, dtype=float)
        model = prophet_lite_fit(dates, 2.0 * t, fourier=())
        friday = dates[-1]
        next_monday = friday + dt.timedelta(days=(7 - friday.weekday()) % 7 or 3)
        out = prophet_lite_forecast(model, date=next_monday)
        assert out.point_forecast == pytest.approx(2.0 * 100, rel=1e-6)
