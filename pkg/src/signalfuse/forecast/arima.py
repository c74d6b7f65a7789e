"""ARIMA(p,d,q) fitted by conditional sum of squares.

The differenced series is centered by its mean (the intercept), AR and MA
coefficients minimize the conditional one-step squared residuals via
Nelder-Mead from zero starting values, and residuals before index p are
conditioned to zero. No Kalman filtering: CSS is the estimator throughout.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from ..errors import InsufficientHistory, NonConvergence, TooShort
from .base import ForecastResult

MAX_ITER = 2000


@dataclass(frozen=True)
class ArimaModel:
    order: tuple[int, int, int]
    phi: tuple[float, ...]
    theta: tuple[float, ...]
    intercept: float
    sigma2: float
    css: float
    n_eff: int
    stationary: bool
    fit_window: tuple[dt.date, dt.date] | None = None

    @property
    def tag(self) -> str:
        p, d, q = self.order
        return f"arima({p},{d},{q})"


def difference(series, d: int) -> np.ndarray:
    """Apply the first difference d times; length shrinks by d."""
    x = np.asarray(series, dtype=float)
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    if x.size <= d:
        raise TooShort(f"need more than {d} observations to difference {d} times, got {x.size}")
    for _ in range(d):
        x = np.diff(x)
    return x


def _css_residuals(z: np.ndarray, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Conditional residuals for t >= p, with e_t = 0 assumed before that."""
    p, q = phi.size, theta.size
    u = z[p:].copy()
    for i in range(1, p + 1):
        u -= phi[i - 1] * z[p - i : z.size - i]
    if q == 0:
        return u
    e, _ = lfilter([1.0], np.concatenate(([1.0], theta)), u, zi=np.zeros(q))
    return e


def _check_stationary(phi: np.ndarray) -> bool:
    if phi.size == 0:
        return True
    roots = np.roots(np.concatenate((-phi[::-1], [1.0])))
    return bool(np.all(np.abs(roots) > 1.0))


def arima_fit(
    series,
    order: tuple[int, int, int] = (1, 0, 0),
    fit_window: tuple[dt.date, dt.date] | None = None,
) -> ArimaModel:
    p, d, q = order
    x = np.asarray(series, dtype=float)
    if x.size < 50 + p + d + q:
        raise TooShort(f"need at least {50 + p + d + q} observations for order {order}, got {x.size}")
    w = difference(x, d)
    mu = float(np.mean(w))
    z = w - mu

    if p + q == 0:
        e = z
        phi = np.zeros(0)
        theta = np.zeros(0)
    else:

        def objective(params: np.ndarray) -> float:
            e = _css_residuals(z, params[:p], params[p:])
            return float(np.dot(e, e))

        res = minimize(
            objective,
            np.zeros(p + q),
            method="Nelder-Mead",
            options={"maxiter": MAX_ITER, "maxfev": 2 * MAX_ITER, "xatol": 1e-7, "fatol": 1e-10},
        )
        if not res.success:
            raise NonConvergence(f"CSS search for order {order} failed: {res.message}")
        phi = res.x[:p]
        theta = res.x[p:]
        e = _css_residuals(z, phi, theta)

    css = float(np.dot(e, e))
    n_eff = int(e.size)
    return ArimaModel(
        order=(p, d, q),
        phi=tuple(float(v) for v in phi),
        theta=tuple(float(v) for v in theta),
        intercept=mu,
        sigma2=css / n_eff,
        css=css,
        n_eff=n_eff,
        stationary=_check_stationary(phi),
        fit_window=fit_window,
    )


def arima_forecast(model: ArimaModel, history, date: dt.date | None = None) -> ForecastResult:
    """One-step-ahead conditional expectation with future shocks zeroed."""
    p, d, q = model.order
    x = np.asarray(history, dtype=float)
    if x.size < max(p, q) + d or x.size <= d:
        raise InsufficientHistory(
            f"need at least {max(p, q) + d} observations for order {model.order}, got {x.size}"
        )
    levels = [x]
    for _ in range(d):
        levels.append(np.diff(levels[-1]))
    z = levels[-1] - model.intercept

    phi = np.asarray(model.phi)
    theta = np.asarray(model.theta)
    zhat = 0.0
    for i in range(1, p + 1):
        zhat += phi[i - 1] * z[-i]
    if q > 0:
        e = _css_residuals(z, phi, theta)
        for j in range(1, q + 1):
            if e.size >= j:
                zhat += theta[j - 1] * e[-j]
    forecast = zhat + model.intercept
    for level in reversed(levels[:-1]):
        forecast += level[-1]
    return ForecastResult(date=date, point_forecast=float(forecast), model=model.tag)


def select_arima_order(
    series,
    p_grid=(0, 1, 2),
    d_grid=(0, 1),
    q_grid=(0, 1, 2),
) -> tuple[int, int, int]:
    """Smallest-AIC order over a small grid; AIC = n*ln(sigma2) + 2*(p+q+1)."""
    best: tuple[float, tuple[int, int, int]] | None = None
    for d in d_grid:
        for p in p_grid:
            for q in q_grid:
                try:
                    model = arima_fit(series, (p, d, q))
                except (TooShort, NonConvergence):
                    continue
                aic = model.n_eff * np.log(max(model.sigma2, 1e-300)) + 2 * (p + q + 1)
                if best is None or aic < best[0]:
                    best = (float(aic), (p, d, q))
    if best is None:
        raise NonConvergence("no ARIMA order in the grid could be fitted")
    return best[1]
