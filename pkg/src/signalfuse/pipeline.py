"""Stage orchestration behind the CLI.

Each stage reads and writes documented CSV contracts under the output
directory so stages can also run independently:

  ingest    prices.csv (canonical), sentiment.csv, news_clean.csv
  label     returns.csv, classes.csv
  signals   signals/<name>.csv, signals/manifest.csv, signals/forecasts/*.csv
  backtest  curves/benchmark.csv, curves/<id>.csv, curves/index.csv
  evaluate  reports/<run-id>/accuracy.csv
  report    reports/<run-id>/{returns_table.csv,txt, equity_curves.csv,
            fig1_forecasts.csv, fig2_curves.csv, fig1.svg, fig2.svg, run.json}

The backtest consumes only signal files (plus canonical prices), never raw
news. All floats serialize at 12 significant digits and every iteration is
over sorted or explicitly ordered collections, so identical inputs, config,
and seed reproduce identical bytes.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import evaluation, indicators, news, strategy
from .config import RunConfig
from .errors import ConfigError, DataError
from .forecast import walk_forward
from .market_data import (
    ClassSeries,
    PriceSeries,
    ReturnSeries,
    compute_returns,
    label_returns,
    parse_price_csv,
    price_series_to_csv,
)
from .signals import SignalSeries

logger = logging.getLogger(__name__)

TECHNICAL_NAMES = ("macd", "sar", "vw_macd", "dual_macd")


@dataclass(frozen=True)
class OutPaths:
    root: Path

    @property
    def prices(self) -> Path:
        return self.root / "prices.csv"

    @property
    def sentiment(self) -> Path:
        return self.root / "sentiment.csv"

    @property
    def news_clean(self) -> Path:
        return self.root / "news_clean.csv"

    @property
    def returns(self) -> Path:
        return self.root / "returns.csv"

    @property
    def classes(self) -> Path:
        return self.root / "classes.csv"

    @property
    def signals_dir(self) -> Path:
        return self.root / "signals"

    @property
    def manifest(self) -> Path:
        return self.signals_dir / "manifest.csv"

    @property
    def forecasts_dir(self) -> Path:
        return self.signals_dir / "forecasts"

    @property
    def curves_dir(self) -> Path:
        return self.root / "curves"

    @property
    def curves_index(self) -> Path:
        return self.curves_dir / "index.csv"

    @property
    def benchmark_curve(self) -> Path:
        return self.curves_dir / "benchmark.csv"

    def report_dir(self, run_id: str) -> Path:
        return self.root / "reports" / run_id


def _read(path: Path, what: str) -> str:
    if not path.exists():
        raise DataError(f"{what} file not found: {path}")
    return path.read_text(encoding="utf-8")


def sanitize_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9.+-]+", "_", name).strip("_")


# -- small CSV helpers -------------------------------------------------------------

def _write_signal_csv(path: Path, series: SignalSeries) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "signal", "missing"])
    flags = series.missing or (False,) * len(series)
    for day, value, flag in zip(series.dates, series.values, flags):
        writer.writerow([day.isoformat(), value, int(flag)])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _read_signal_csv(path: Path, source: str) -> SignalSeries:
    reader = csv.reader(io.StringIO(_read(path, "signal"), newline=""))
    next(reader)
    dates, values, flags = [], [], []
    for row in reader:
        if not row:
            continue
        dates.append(dt.date.fromisoformat(row[0]))
        values.append(int(row[1]))
        flags.append(bool(int(row[2])))
    return SignalSeries(tuple(dates), tuple(values), source, tuple(flags))


def _write_curve_csv(path: Path, curve: strategy.EquityCurve) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "cash", "shares", "price", "value", "return"])
    c0 = curve.initial_capital
    for s in curve.states:
        writer.writerow(
            [
                s.date.isoformat(),
                f"{s.cash:.12g}",
                f"{s.shares:.12g}",
                f"{s.price:.12g}",
                f"{s.value:.12g}",
                f"{(s.value - c0) / c0:.12g}",
            ]
        )
    path.write_text(buf.getvalue(), encoding="utf-8")


def _read_curve_csv(path: Path, capital: float) -> strategy.EquityCurve:
    reader = csv.reader(io.StringIO(_read(path, "equity curve"), newline=""))
    next(reader)
    states = []
    for row in reader:
        if not row:
            continue
        states.append(
            strategy.PortfolioState(
                date=dt.date.fromisoformat(row[0]),
                cash=float(row[1]),
                shares=float(row[2]),
                price=float(row[3]),
            )
        )
    return strategy.EquityCurve(states=tuple(states), initial_capital=capital)


def _load_prices(paths: OutPaths) -> PriceSeries:
    return parse_price_csv(_read(paths.prices, "canonical prices"))


def _load_returns(paths: OutPaths) -> ReturnSeries:
    reader = csv.reader(io.StringIO(_read(paths.returns, "returns"), newline=""))
    next(reader)
    dates, values = [], []
    for row in reader:
        if not row:
            continue
        dates.append(dt.date.fromisoformat(row[0]))
        values.append(float(row[1]))
    return ReturnSeries(tuple(dates), tuple(values))


def _load_classes(paths: OutPaths) -> ClassSeries:
    reader = csv.reader(io.StringIO(_read(paths.classes, "classes"), newline=""))
    next(reader)
    dates, classes = [], []
    for row in reader:
        if not row:
            continue
        dates.append(dt.date.fromisoformat(row[0]))
        classes.append(int(row[1]))
    return ClassSeries(tuple(dates), tuple(classes))


# -- stages ---------------------------------------------------------------------------

def stage_ingest(cfg: RunConfig) -> None:
    paths = OutPaths(cfg.out_dir)
    paths.root.mkdir(parents=True, exist_ok=True)
    prices = parse_price_csv(_read(cfg.prices, "price"))
    paths.prices.write_text(price_series_to_csv(prices), encoding="utf-8")
    logger.info("ingested %d price bars", len(prices))

    if cfg.sentiment is not None:
        records = news.parse_sentiment_csv(_read(cfg.sentiment, "sentiment"))
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(news.SENTIMENT_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.timestamp.isoformat(sep=" "),
                    r.source,
                    r.model,
                    r.label,
                    "" if r.score is None else f"{r.score:.12g}",
                ]
            )
        paths.sentiment.write_text(buf.getvalue(), encoding="utf-8")
        logger.info("ingested %d sentiment records", len(records))

    if cfg.news is not None:
        articles = news.parse_news_csv(_read(cfg.news, "news"))
        cleaned, stats = news.clean_news(articles)
        paths.news_clean.write_text(news.news_to_csv(cleaned), encoding="utf-8")
        logger.info(
            "cleaned news: kept %d, dropped %d keyword / %d no-timestamp, repaired %d",
            stats.kept, stats.dropped_keyword, stats.dropped_no_timestamp,
            stats.repaired_timestamp,
        )


def stage_label(cfg: RunConfig) -> None:
    paths = OutPaths(cfg.out_dir)
    prices = _load_prices(paths)
    returns = compute_returns(prices)
    classes = label_returns(returns, cfg.pos_threshold, cfg.neg_threshold)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "return"])
    for day, value in zip(returns.dates, returns.values):
        writer.writerow([day.isoformat(), f"{value:.12g}"])
    paths.returns.write_text(buf.getvalue(), encoding="utf-8")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "class"])
    for day, cls in zip(classes.dates, classes.classes):
        writer.writerow([day.isoformat(), cls])
    paths.classes.write_text(buf.getvalue(), encoding="utf-8")


def _window(cfg: RunConfig) -> tuple[dt.date | None, dt.date | None]:
    return (cfg.window_from, cfg.window_to)


def stage_signals(cfg: RunConfig) -> None:
    paths = OutPaths(cfg.out_dir)
    paths.signals_dir.mkdir(parents=True, exist_ok=True)
    paths.forecasts_dir.mkdir(parents=True, exist_ok=True)
    prices = _load_prices(paths)
    returns = _load_returns(paths)
    classes = _load_classes(paths).window(*_window(cfg))
    dates = prices.dates()
    closes = prices.adj_closes()
    volumes = prices.volumes()
    ind = cfg.indicators

    manifest: list[tuple[str, str, str, str, str]] = []  # name, file, kind, model, source

    def emit(series: SignalSeries, kind: str, model: str = "", source: str = "") -> None:
        fname = sanitize_name(series.source) + ".csv"
        _write_signal_csv(paths.signals_dir / fname, series)
        manifest.append((series.source, fname, kind, model, source))

    macd_out = indicators.macd(closes, *ind.macd)
    emit(
        indicators.signalize(ind.macd_rule, dates, macd_out=macd_out, source="macd"),
        "technical",
    )
    sar_values, sar_signals = indicators.parabolic_sar(prices, *ind.sar)
    emit(sar_signals, "technical")
    vw_out = indicators.vw_macd(closes, volumes, *ind.macd)
    if ind.vw_rule == "vw_price_level":
        vw_slow = indicators.volume_weighted_ema(closes, volumes, ind.macd[1])
        emit(
            indicators.signalize(
                "vw_price_level", dates, close=closes, vwema_slow=vw_slow, source="vw_macd"
            ),
            "technical",
        )
    else:
        emit(
            indicators.signalize(ind.vw_rule, dates, macd_out=vw_out, source="vw_macd"),
            "technical",
        )
    emit(indicators.dual_macd(closes, dates, ind.dual_short, ind.dual_long), "technical")

    for spec_text in cfg.forecaster_specs:
        result = walk_forward(
            returns,
            spec_text,
            _window(cfg),
            refit_every=cfg.refit_every,
            min_train=cfg.min_train,
        )
        emit(result.signals, "forecast")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["date", "forecast"])
        for fr in result.forecasts:
            writer.writerow([fr.date.isoformat(), f"{fr.point_forecast:.12g}"])
        fname = sanitize_name(result.signals.source) + ".csv"
        (paths.forecasts_dir / fname).write_text(buf.getvalue(), encoding="utf-8")
        for day, message in result.failures:
            logger.warning("%s failed on %s: %s", spec_text, day.isoformat(), message)

    if paths.sentiment.exists():
        records = news.parse_sentiment_csv(_read(paths.sentiment, "sentiment"))
        daily = news.daily_sentiments(records, dates)
        aligned = news.join_sentiment_returns(daily, classes, cfg.lag, calendar=dates)
        for source, model in aligned.keys:
            series = aligned.signal_series(source, model)
            emit(series, "sentiment", model=model, source=source)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "file", "kind", "model", "news_source"])
    for row in sorted(manifest):
        writer.writerow(row)
    paths.manifest.write_text(buf.getvalue(), encoding="utf-8")


def _load_manifest(paths: OutPaths) -> dict[str, dict[str, str]]:
    reader = csv.reader(io.StringIO(_read(paths.manifest, "signal manifest"), newline=""))
    next(reader)
    out: dict[str, dict[str, str]] = {}
    for row in reader:
        if not row:
            continue
        name, fname, kind, model, source = row
        out[name] = {"file": fname, "kind": kind, "model": model, "news_source": source}
    return out


def _strategy_id(cfg: RunConfig, spec) -> str:
    import hashlib

    blob = f"{cfg.run_id}|{spec.row}|{spec.col}|{'+'.join(spec.components)}"
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def stage_backtest(cfg: RunConfig) -> None:
    paths = OutPaths(cfg.out_dir)
    paths.curves_dir.mkdir(parents=True, exist_ok=True)
    prices = _load_prices(paths).window(*_window(cfg))
    if len(prices) < 2:
        raise DataError("test window holds fewer than 2 trading days")
    manifest = _load_manifest(paths)
    window_dates = prices.dates()

    benchmark = strategy.buy_and_hold(prices, cfg.capital)
    _write_curve_csv(paths.benchmark_curve, benchmark)

    index_rows = []
    for spec in cfg.strategies:
        component_maps = {}
        for name in spec.components:
            if name not in manifest:
                raise ConfigError(
                    f"strategy ({spec.row!r}, {spec.col!r}) references unknown signal {name!r}"
                )
            series = _read_signal_csv(paths.signals_dir / manifest[name]["file"], name)
            component_maps[name] = series.as_dict()

        combined = [
            strategy.combine_signals(
                {name: m.get(day, 0) for name, m in component_maps.items()}, day
            ).value
            for day in window_dates
        ]
        if cfg.execution == "next_day":
            executed = [0] + combined[:-1]
        else:
            executed = combined
        exec_series = SignalSeries(window_dates, tuple(executed), source=spec.label)
        curve = strategy.simulate(prices, exec_series, cfg.capital, cfg.cost)
        sid = _strategy_id(cfg, spec)
        _write_curve_csv(paths.curves_dir / f"{sid}.csv", curve)
        index_rows.append([sid, spec.row, spec.col, "+".join(spec.components)])

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "row", "col", "components"])
    for row in sorted(index_rows):
        writer.writerow(row)
    paths.curves_index.write_text(buf.getvalue(), encoding="utf-8")


def stage_evaluate(cfg: RunConfig) -> None:
    paths = OutPaths(cfg.out_dir)
    report_dir = paths.report_dir(cfg.run_id)
    report_dir.mkdir(parents=True, exist_ok=True)
    classes = _load_classes(paths).window(*_window(cfg))
    manifest = _load_manifest(paths)

    rows: list[evaluation.AccuracyRow] = []
    for name in sorted(manifest):
        meta = manifest[name]
        series = _read_signal_csv(paths.signals_dir / meta["file"], name).window(*_window(cfg))
        overlap = [d for d in series.dates if d in set(classes.dates)]
        if not overlap:
            logger.warning("signal %s has no overlap with the window classes; skipped", name)
            continue
        acc = evaluation.classification_accuracy(series, classes)
        label = "sentiment" if meta["kind"] == "sentiment" else name
        rows.append(
            evaluation.AccuracyRow(
                signal=label,
                model=meta["model"],
                news_source=meta["news_source"],
                accuracy=acc,
                n_days=len(overlap),
            )
        )
    (report_dir / "accuracy.csv").write_text(
        evaluation.accuracy_report_csv(rows), encoding="utf-8"
    )


def stage_report(cfg: RunConfig) -> None:
    paths = OutPaths(cfg.out_dir)
    report_dir = paths.report_dir(cfg.run_id)
    report_dir.mkdir(parents=True, exist_ok=True)

    benchmark = _read_curve_csv(paths.benchmark_curve, cfg.capital)
    reader = csv.reader(io.StringIO(_read(paths.curves_index, "curve index"), newline=""))
    next(reader)
    runs = []
    labels = {}
    for row in reader:
        if not row:
            continue
        sid, row_label, col_label, _ = row
        curve = _read_curve_csv(paths.curves_dir / f"{sid}.csv", cfg.capital)
        runs.append(evaluation.TableRun(row=row_label, col=col_label, curve=curve))
        labels[sid] = f"{row_label} / {col_label}"

    table = evaluation.build_returns_table(runs, benchmark)
    (report_dir / "returns_table.csv").write_text(
        evaluation.returns_table_csv(table), encoding="utf-8"
    )
    (report_dir / "returns_table.txt").write_text(
        evaluation.returns_table_text(table), encoding="utf-8"
    )

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["strategy", "date", "cash", "shares", "price", "value", "return"])
    curve_list = [("buy_and_hold", benchmark)] + sorted(
        ((labels[sid], _read_curve_csv(paths.curves_dir / f"{sid}.csv", cfg.capital))
         for sid in labels),
        key=lambda item: item[0],
    )
    for label, curve in curve_list:
        c0 = curve.initial_capital
        for s in curve.states:
            writer.writerow(
                [
                    label,
                    s.date.isoformat(),
                    f"{s.cash:.12g}",
                    f"{s.shares:.12g}",
                    f"{s.price:.12g}",
                    f"{s.value:.12g}",
                    f"{(s.value - c0) / c0:.12g}",
                ]
            )
    (report_dir / "equity_curves.csv").write_text(buf.getvalue(), encoding="utf-8")

    # Figure 1: actual vs. predicted daily returns over the window.
    returns = _load_returns(paths).window(*_window(cfg))
    fig1 = [evaluation.PlotSeries("actual", returns.dates, returns.values)]
    if paths.forecasts_dir.exists():
        for fpath in sorted(paths.forecasts_dir.glob("*.csv")):
            freader = csv.reader(io.StringIO(fpath.read_text(encoding="utf-8"), newline=""))
            next(freader)
            fdates, fvalues = [], []
            for row in freader:
                if not row:
                    continue
                fdates.append(dt.date.fromisoformat(row[0]))
                fvalues.append(float(row[1]))
            if fdates:
                fig1.append(evaluation.PlotSeries(fpath.stem, tuple(fdates), tuple(fvalues)))
    (report_dir / "fig1_forecasts.csv").write_text(
        evaluation.plot_data_csv(fig1), encoding="utf-8"
    )
    (report_dir / "fig1.svg").write_text(
        evaluation.render_line_chart_svg(fig1, "Actual vs. predicted daily returns", "return"),
        encoding="utf-8",
    )

    # Figure 2: portfolio values of every strategy against the benchmark.
    fig2 = [
        evaluation.PlotSeries(label, curve.dates(), tuple(float(v) for v in curve.values()))
        for label, curve in curve_list
    ]
    (report_dir / "fig2_curves.csv").write_text(
        evaluation.plot_data_csv(fig2), encoding="utf-8"
    )
    (report_dir / "fig2.svg").write_text(
        evaluation.render_line_chart_svg(fig2, "Portfolio value by strategy", "value"),
        encoding="utf-8",
    )

    meta = {
        "run_id": cfg.run_id,
        "window": [
            None if cfg.window_from is None else cfg.window_from.isoformat(),
            None if cfg.window_to is None else cfg.window_to.isoformat(),
        ],
        "lag": cfg.lag,
        "execution": cfg.execution,
        "capital": cfg.capital,
        "cost": cfg.cost,
        "seed": cfg.seed,
        "strategies": [
            {"row": s.row, "col": s.col, "components": list(s.components)}
            for s in cfg.strategies
        ],
        "accuracy_protocol": (
            "state signal vs. same-day realized class over the test window; "
            "reconstructed protocol, window and lag per run config"
        ),
    }
    (report_dir / "run.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


STAGES = {
    "ingest": stage_ingest,
    "label": stage_label,
    "signals": stage_signals,
    "backtest": stage_backtest,
    "evaluate": stage_evaluate,
    "report": stage_report,
}

STAGE_ORDER = ("ingest", "label", "signals", "backtest", "evaluate", "report")


def run_all(cfg: RunConfig) -> None:
    np.random.seed(cfg.seed)  # nothing in the pipeline draws, but pin anyway
    for name in STAGE_ORDER:
        logger.info("stage: %s", name)
        STAGES[name](cfg)
