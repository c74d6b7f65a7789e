"""Run configuration: TOML file plus CLI-flag overrides.

Defaults mirror the standard constants used throughout: MACD 12/26/9, the
long dual configuration 19/39/9, SAR acceleration 0.02/0.02/0.2, class
thresholds of plus/minus 1%, sentiment lag k=1, $10,000 initial capital,
zero trading costs, and next-day execution.
"""
from __future__ import annotations

import datetime as dt
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError

EXECUTION_MODES = ("next_day", "same_day")


@dataclass(frozen=True)
class StrategySpec:
    row: str
    col: str
    components: tuple[str, ...]

    @property
    def label(self) -> str:
        return f"{self.row} / {self.col}"


@dataclass
class IndicatorParams:
    macd: tuple[int, int, int] = (12, 26, 9)
    dual_short: tuple[int, int, int] = (12, 26, 9)
    dual_long: tuple[int, int, int] = (19, 39, 9)
    sar: tuple[float, float, float] = (0.02, 0.02, 0.2)
    macd_rule: str = "macd_state"
    vw_rule: str = "vw_state"


@dataclass
class RunConfig:
    prices: Path
    sentiment: Path | None = None
    news: Path | None = None
    window_from: dt.date | None = None
    window_to: dt.date | None = None
    lag: int = 1
    pos_threshold: float = 0.01
    neg_threshold: float = -0.01
    indicators: IndicatorParams = field(default_factory=IndicatorParams)
    forecaster_specs: tuple[str, ...] = ("arima(1,0,0)", "ets(add,none,none)")
    min_train: int = 200
    refit_every: int = 1
    execution: str = "next_day"
    capital: float = 10_000.0
    cost: float = 0.0
    seed: int = 0
    out_dir: Path = Path("out")
    strategies: tuple[StrategySpec, ...] = ()

    def validate(self) -> None:
        if self.lag not in (0, 1, 2):
            raise ConfigError(f"lag must be 0, 1, or 2, got {self.lag}")
        if self.capital <= 0:
            raise ConfigError(f"capital must be positive, got {self.capital}")
        if self.execution not in EXECUTION_MODES:
            raise ConfigError(f"execution must be one of {EXECUTION_MODES}, got {self.execution!r}")
        if not (self.neg_threshold < 0.0 < self.pos_threshold):
            raise ConfigError(
                f"need neg_threshold < 0 < pos_threshold, got "
                f"{self.neg_threshold}, {self.pos_threshold}"
            )
        if self.min_train < 1 or self.refit_every < 1:
            raise ConfigError("min_train and refit_every must be >= 1")
        if not (0.0 <= self.cost < 1.0):
            raise ConfigError(f"cost must be in [0, 1), got {self.cost}")

    def semantic_dict(self) -> dict:
        """Fields that define the run's meaning; excludes the output location."""
        return {
            "prices": str(self.prices),
            "sentiment": None if self.sentiment is None else str(self.sentiment),
            "news": None if self.news is None else str(self.news),
            "window": [
                None if self.window_from is None else self.window_from.isoformat(),
                None if self.window_to is None else self.window_to.isoformat(),
            ],
            "lag": self.lag,
            "thresholds": [self.pos_threshold, self.neg_threshold],
            "indicators": {
                "macd": list(self.indicators.macd),
                "dual_short": list(self.indicators.dual_short),
                "dual_long": list(self.indicators.dual_long),
                "sar": list(self.indicators.sar),
                "macd_rule": self.indicators.macd_rule,
                "vw_rule": self.indicators.vw_rule,
            },
            "forecasters": list(self.forecaster_specs),
            "min_train": self.min_train,
            "refit_every": self.refit_every,
            "execution": self.execution,
            "capital": self.capital,
            "cost": self.cost,
            "seed": self.seed,
            "strategies": [
                {"row": s.row, "col": s.col, "components": list(s.components)}
                for s in self.strategies
            ],
        }

    @property
    def run_id(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _get(table: dict, key: str, kind, where: str):
    value = table[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"{where}.{key} has wrong type {type(value).__name__}")
    return value


def _parse_date(raw: str, where: str) -> dt.date:
    try:
        return dt.date.fromisoformat(raw)
    except ValueError:
        raise ConfigError(f"{where}: bad date {raw!r}") from None


def _triple(raw, where: str, cast=int) -> tuple:
    if not isinstance(raw, list) or len(raw) != 3:
        raise ConfigError(f"{where} must be a 3-element list")
    return tuple(cast(v) for v in raw)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    cfg = RunConfig(prices=Path("prices.csv"))

    data = doc.get("data", {})
    if "prices" in data:
        cfg.prices = Path(_get(data, "prices", str, "data"))
    if "sentiment" in data:
        cfg.sentiment = Path(_get(data, "sentiment", str, "data"))
    if "news" in data:
        cfg.news = Path(_get(data, "news", str, "data"))

    window = doc.get("window", {})
    if "from" in window:
        cfg.window_from = _parse_date(_get(window, "from", str, "window"), "window.from")
    if "to" in window:
        cfg.window_to = _parse_date(_get(window, "to", str, "window"), "window.to")

    labels = doc.get("labels", {})
    if "pos_threshold" in labels:
        cfg.pos_threshold = _get(labels, "pos_threshold", float, "labels")
    if "neg_threshold" in labels:
        cfg.neg_threshold = _get(labels, "neg_threshold", float, "labels")

    join = doc.get("join", {})
    if "lag" in join:
        cfg.lag = _get(join, "lag", int, "join")

    portfolio = doc.get("portfolio", {})
    if "capital" in portfolio:
        cfg.capital = _get(portfolio, "capital", float, "portfolio")
    if "execution" in portfolio:
        cfg.execution = _get(portfolio, "execution", str, "portfolio")
    if "cost" in portfolio:
        cfg.cost = _get(portfolio, "cost", float, "portfolio")

    ind = doc.get("indicators", {})
    params = IndicatorParams()
    if "macd" in ind:
        params.macd = _triple(ind["macd"], "indicators.macd")
    if "dual_short" in ind:
        params.dual_short = _triple(ind["dual_short"], "indicators.dual_short")
    if "dual_long" in ind:
        params.dual_long = _triple(ind["dual_long"], "indicators.dual_long")
    if "sar" in ind:
        params.sar = _triple(ind["sar"], "indicators.sar", cast=float)
    if "macd_rule" in ind:
        params.macd_rule = _get(ind, "macd_rule", str, "indicators")
    if "vw_rule" in ind:
        params.vw_rule = _get(ind, "vw_rule", str, "indicators")
    cfg.indicators = params

    fc = doc.get("forecasters", {})
    if "specs" in fc:
        specs = fc["specs"]
        if not isinstance(specs, list) or not all(isinstance(s, str) for s in specs):
            raise ConfigError("forecasters.specs must be a list of strings")
        cfg.forecaster_specs = tuple(specs)
    if "min_train" in fc:
        cfg.min_train = _get(fc, "min_train", int, "forecasters")
    if "refit_every" in fc:
        cfg.refit_every = _get(fc, "refit_every", int, "forecasters")

    run = doc.get("run", {})
    if "seed" in run:
        cfg.seed = _get(run, "seed", int, "run")
    if "out" in run:
        cfg.out_dir = Path(_get(run, "out", str, "run"))

    strategies = []
    for i, entry in enumerate(doc.get("strategies", [])):
        for key in ("row", "col", "components"):
            if key not in entry:
                raise ConfigError(f"strategies[{i}] missing {key!r}")
        comps = entry["components"]
        if not isinstance(comps, list) or not comps:
            raise ConfigError(f"strategies[{i}].components must be a non-empty list")
        strategies.append(
            StrategySpec(row=str(entry["row"]), col=str(entry["col"]), components=tuple(comps))
        )
    cfg.strategies = tuple(strategies)

    cfg.validate()
    return cfg


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    """Fold parsed CLI flags into a loaded config (flags win)."""
    if getattr(args, "prices", None):
        cfg.prices = Path(args.prices)
    if getattr(args, "sentiment", None):
        cfg.sentiment = Path(args.sentiment)
    if getattr(args, "news", None):
        cfg.news = Path(args.news)
    if getattr(args, "window_from", None):
        cfg.window_from = _parse_date(args.window_from, "--from")
    if getattr(args, "window_to", None):
        cfg.window_to = _parse_date(args.window_to, "--to")
    if getattr(args, "lag", None) is not None:
        cfg.lag = args.lag
    if getattr(args, "execution", None):
        cfg.execution = args.execution
    if getattr(args, "capital", None) is not None:
        cfg.capital = args.capital
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None):
        cfg.out_dir = Path(args.out)
    cfg.validate()
    return cfg
