"""Error/Trend/Seasonality exponential smoothing.

Components are additive, multiplicative, or absent per the spec triple.
Smoothing weights are chosen by a coarse grid (0.01 to 0.99, step 0.02)
over the one-step residual objective - squared errors for additive error,
squared relative errors for multiplicative - then refined with Nelder-Mead.
States initialize from the first 2m observations: level from the window
mean (anchored at the window end when a trend is present), trend from the
average first difference or ratio, seasonal states from detrended means or
ratios. The grid pass runs all parameter combinations simultaneously as
numpy vectors.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from ..errors import NonPositiveData, TooShort
from .base import ForecastResult

GRID = np.arange(0.01, 1.0, 0.02)  # 50 candidate values per active weight


@dataclass(frozen=True)
class EtsSpec:
    error: str = "add"  # add | mul
    trend: str = "none"  # add | mul | none
    seasonal: str = "none"  # add | mul | none
    period: int = 1

    def __post_init__(self) -> None:
        if self.error not in ("add", "mul"):
            raise ValueError(f"error must be add or mul, got {self.error!r}")
        if self.trend not in ("add", "mul", "none"):
            raise ValueError(f"trend must be add, mul, or none, got {self.trend!r}")
        if self.seasonal not in ("add", "mul", "none"):
            raise ValueError(f"seasonal must be add, mul, or none, got {self.seasonal!r}")
        if self.seasonal != "none" and self.period < 2:
            raise ValueError("seasonal spec requires period >= 2")

    @property
    def tag(self) -> str:
        parts = [self.error, self.trend, self.seasonal]
        if self.seasonal != "none":
            parts.append(str(self.period))
        return f"ets({','.join(parts)})"

    @property
    def has_mul(self) -> bool:
        return "mul" in (self.error, self.trend, self.seasonal)


@dataclass
class EtsModel:
    spec: EtsSpec
    alpha: float
    beta: float | None
    gamma: float | None
    level: float
    trend_state: float | None
    seasonal_states: tuple[float, ...]
    residuals: np.ndarray
    fitted: np.ndarray
    sse: float
    warmup: int

    @property
    def tag(self) -> str:
        return self.spec.tag


def _initial_states(y: np.ndarray, spec: EtsSpec) -> tuple[float, float, list[float], int]:
    m = spec.period if spec.seasonal != "none" else 1
    w = 2 * m
    init = y[:w]
    base = float(np.mean(init))
    tt = np.arange(w, dtype=float)
    mid = (w - 1) / 2.0
    if spec.trend == "add":
        b0 = float(np.mean(np.diff(init)))
        l0 = base + b0 * mid
        trend_fit = base + b0 * (tt - mid)
    elif spec.trend == "mul":
        b0 = float(np.mean(init[1:] / init[:-1]))
        l0 = base * b0**mid
        trend_fit = base * b0 ** (tt - mid)
    else:
        b0 = 0.0
        l0 = base
        trend_fit = np.full(w, base)

    seasonal: list[float] = []
    if spec.seasonal == "add":
        resid = init - trend_fit
        raw = [float(np.mean(resid[j::m])) for j in range(m)]
        shift = sum(raw) / m
        seasonal = [r - shift for r in raw]
    elif spec.seasonal == "mul":
        ratio = init / trend_fit
        raw = [float(np.mean(ratio[j::m])) for j in range(m)]
        scale = sum(raw) / m
        seasonal = [r / scale for r in raw]
    return l0, b0, seasonal, w


def _run(
    y: np.ndarray,
    spec: EtsSpec,
    alpha,
    beta,
    gamma,
    l0: float,
    b0: float,
    s0: list[float],
    start: int,
    store: bool = False,
):
    """One-step recursion, broadcast over parameter vectors.

    Returns (objective, level, trend, seasonal ring, fitted) where fitted is
    only populated when store=True (single parameter set).
    """
    alpha = np.asarray(alpha, dtype=float)
    l = np.broadcast_to(np.asarray(l0, dtype=float), alpha.shape).copy()
    b = np.broadcast_to(np.asarray(b0, dtype=float), alpha.shape).copy()
    ring = [np.broadcast_to(np.asarray(s, dtype=float), alpha.shape).copy() for s in s0]
    sse = np.zeros(alpha.shape)
    bad = np.zeros(alpha.shape, dtype=bool)
    fitted: list[float] = []

    with np.errstate(all="ignore"):
        for t in range(start, y.size):
            if spec.trend == "add":
                base = l + b
            elif spec.trend == "mul":
                base = l * b
            else:
                base = l
            if spec.seasonal == "add":
                s_use = ring[0]
                yhat = base + s_use
            elif spec.seasonal == "mul":
                s_use = ring[0]
                yhat = base * s_use
            else:
                s_use = None
                yhat = base

            if spec.error == "add":
                e = y[t] - yhat
                sse = sse + e * e
            else:
                bad |= ~(yhat > 0)
                r = y[t] / yhat - 1.0
                sse = sse + r * r

            if spec.seasonal == "add":
                ynet = y[t] - s_use
            elif spec.seasonal == "mul":
                ynet = y[t] / s_use
            else:
                ynet = y[t]
            l_new = alpha * ynet + (1.0 - alpha) * base
            if spec.trend == "add":
                b = beta * (l_new - l) + (1.0 - beta) * b
            elif spec.trend == "mul":
                b = beta * (l_new / l) + (1.0 - beta) * b
            if spec.seasonal == "add":
                s_new = gamma * (y[t] - base) + (1.0 - gamma) * s_use
                ring.pop(0)
                ring.append(s_new)
            elif spec.seasonal == "mul":
                s_new = gamma * (y[t] / base) + (1.0 - gamma) * s_use
                ring.pop(0)
                ring.append(s_new)
            l = l_new
            if store:
                fitted.append(float(np.ravel(yhat)[0]))

    sse = np.where(np.isfinite(sse) & ~bad, sse, np.inf)
    return sse, l, b, ring, fitted


def _ses_objective(y: np.ndarray, spec: EtsSpec, l0: float, start: int, alpha: float) -> float:
    """Level-only one-step objective via a linear filter (same recursion as _run).

    Only valid for trend == seasonal == "none"; the smoothing recursion is then
    l_t = alpha*y_t + (1-alpha)*l_{t-1}, which lfilter evaluates in C.
    """
    levels = lfilter(
        [alpha], [1.0, -(1.0 - alpha)], y[start:], zi=np.array([(1.0 - alpha) * l0])
    )[0]
    yhat = np.concatenate(([l0], levels[:-1]))
    if spec.error == "add":
        e = y[start:] - yhat
        return float(np.dot(e, e))
    if np.any(yhat <= 0):
        return float("inf")
    r = y[start:] / yhat - 1.0
    return float(np.dot(r, r))


def _active_params(spec: EtsSpec) -> int:
    return 1 + (spec.trend != "none") + (spec.seasonal != "none")


def _unpack(spec: EtsSpec, params: np.ndarray):
    alpha = params[0]
    i = 1
    beta = gamma = None
    if spec.trend != "none":
        beta = params[i]
        i += 1
    if spec.seasonal != "none":
        gamma = params[i]
    return alpha, beta, gamma


def ets_fit(series, spec: EtsSpec) -> EtsModel:
    y = np.asarray(series, dtype=float)
    m_seas = spec.period if spec.seasonal != "none" else 0
    need = 10 + 2 * m_seas
    if y.size < need:
        raise TooShort(f"need at least {need} observations for {spec.tag}, got {y.size}")
    if spec.has_mul and np.min(y) <= 0:
        raise NonPositiveData(f"{spec.tag} requires strictly positive data")

    l0, b0, s0, start = _initial_states(y, spec)
    k = _active_params(spec)
    grids = np.meshgrid(*([GRID] * k), indexing="ij")
    flat = [g.ravel() for g in grids]
    alpha, beta, gamma = _unpack(spec, np.asarray(flat))
    sse, _, _, _, _ = _run(y, spec, alpha, beta, gamma, l0, b0, s0, start)
    best = int(np.argmin(sse))
    x0 = np.array([f[best] for f in flat])

    def objective(params: np.ndarray) -> float:
        if np.any(params < 0.0) or np.any(params > 1.0):
            return 1e18
        a, bt, g = _unpack(spec, params)
        val, _, _, _, _ = _run(y, spec, np.asarray([a]), bt, g, l0, b0, s0, start)
        return float(val[0]) if np.isfinite(val[0]) else 1e18

    res = minimize(objective, x0, method="Nelder-Mead", options={"maxiter": 500, "fatol": 1e-12})
    params = res.x if objective(res.x) <= objective(x0) else x0
    alpha_f, beta_f, gamma_f = _unpack(spec, params)

    sse_f, l, b, ring, fitted = _run(
        y, spec, np.asarray([alpha_f]), beta_f, gamma_f, l0, b0, s0, start, store=True
    )
    fitted_arr = np.asarray(fitted)
    window = y[start:]
    residuals = window - fitted_arr if spec.error == "add" else window / fitted_arr
    return EtsModel(
        spec=spec,
        alpha=float(alpha_f),
        beta=None if beta_f is None else float(beta_f),
        gamma=None if gamma_f is None else float(gamma_f),
        level=float(l[0]),
        trend_state=None if spec.trend == "none" else float(b[0]),
        seasonal_states=tuple(float(s[0]) for s in ring),
        residuals=residuals,
        fitted=fitted_arr,
        sse=float(sse_f[0]),
        warmup=start,
    )


def ets_forecast(model: EtsModel, h: int = 1, date: dt.date | None = None) -> ForecastResult:
    """Compose trend and seasonal states h steps ahead."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    spec = model.spec
    if spec.trend == "add":
        base = model.level + h * model.trend_state
    elif spec.trend == "mul":
        base = model.level * model.trend_state**h
    else:
        base = model.level
    if spec.seasonal != "none":
        s = model.seasonal_states[(h - 1) % spec.period]
        value = base + s if spec.seasonal == "add" else base * s
    else:
        value = base
    return ForecastResult(date=date, point_forecast=float(value), model=model.tag)
