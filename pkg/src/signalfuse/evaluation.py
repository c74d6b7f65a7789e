"""Accuracy metrics, return tables, and plot-data exports.

Accuracy is the fraction of date-aligned days where a signal equals the
realized return class. Table text renders percentages at two decimals;
CSV exports keep 12 significant digits. SVG charts are hand-rolled
(fixed palette, fixed coordinate formatting) so identical inputs produce
identical bytes.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyInput, NoOverlap, WindowMismatch
from .market_data import ClassSeries
from .signals import SignalSeries
from .strategy import EquityCurve, strategy_return

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
)


# -- accuracy ---------------------------------------------------------------------

def classification_accuracy(signals: SignalSeries, truth: ClassSeries) -> float:
    """Fraction of overlapping days where signal equals the return class."""
    truth_by_date = dict(zip(truth.dates, truth.classes))
    hits = 0
    n = 0
    for day, value in zip(signals.dates, signals.values):
        cls = truth_by_date.get(day)
        if cls is None:
            continue
        n += 1
        hits += int(value == cls)
    if n == 0:
        raise NoOverlap(f"no dates shared between {signals.source!r} signals and classes")
    return hits / n


@dataclass(frozen=True)
class AccuracyRow:
    signal: str
    model: str
    news_source: str
    accuracy: float
    n_days: int


def accuracy_report_csv(rows: Sequence[AccuracyRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["signal", "model", "news_source", "accuracy", "n_days"])
    for r in sorted(rows, key=lambda r: (r.signal, r.model, r.news_source)):
        writer.writerow([r.signal, r.model, r.news_source, f"{r.accuracy:.12g}", r.n_days])
    return buf.getvalue()


# -- returns table ------------------------------------------------------------------

@dataclass(frozen=True)
class TableRun:
    row: str
    col: str
    curve: EquityCurve


@dataclass(frozen=True)
class ReturnsTable:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: dict[tuple[str, str], float]
    benchmark: float


def build_returns_table(runs: Sequence[TableRun], benchmark: EquityCurve) -> ReturnsTable:
    """Final mark-to-market return per (strategy, news source) cell plus benchmark."""
    bench_dates = benchmark.dates()
    for run in runs:
        if run.curve.dates() != bench_dates:
            raise WindowMismatch(
                f"run ({run.row!r}, {run.col!r}) covers a different window than the benchmark"
            )
    rows = tuple(sorted({r.row for r in runs}))
    cols = tuple(sorted({r.col for r in runs}))
    cells = {(r.row, r.col): strategy_return(r.curve) for r in runs}
    return ReturnsTable(rows=rows, cols=cols, cells=cells, benchmark=strategy_return(benchmark))


def returns_table_csv(table: ReturnsTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["strategy", *table.cols])
    for row in table.rows:
        out: list[str] = [row]
        for col in table.cols:
            value = table.cells.get((row, col))
            out.append("" if value is None else f"{value:.12g}")
        writer.writerow(out)
    writer.writerow(["buy_and_hold", *[f"{table.benchmark:.12g}"] * len(table.cols)])
    return buf.getvalue()


def returns_table_text(table: ReturnsTable) -> str:
    """Aligned text rendering with returns as two-decimal percentages."""
    header = ["strategy", *table.cols]
    lines = [header]
    for row in table.rows:
        cells = [row]
        for col in table.cols:
            value = table.cells.get((row, col))
            cells.append("-" if value is None else f"{100.0 * value:.2f}%")
        lines.append(cells)
    lines.append(["buy_and_hold", *[f"{100.0 * table.benchmark:.2f}%"] * len(table.cols)])
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    rendered = []
    for line in lines:
        rendered.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
    return "\n".join(rendered) + "\n"


# -- plot exports ---------------------------------------------------------------------

@dataclass(frozen=True)
class PlotSeries:
    name: str
    dates: tuple[dt.date, ...]
    values: tuple[float, ...]


def plot_data_csv(series: Sequence[PlotSeries]) -> str:
    if not series or all(len(s.dates) == 0 for s in series):
        raise EmptyInput("no plot series")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["series", "date", "value"])
    for s in series:
        for day, value in zip(s.dates, s.values):
            writer.writerow([s.name, day.isoformat(), f"{value:.12g}"])
    return buf.getvalue()


def parse_plot_csv(text: str) -> dict[str, list[tuple[dt.date, float]]]:
    reader = csv.reader(io.StringIO(text, newline=""))
    next(reader)
    out: dict[str, list[tuple[dt.date, float]]] = {}
    for name, day, value in reader:
        out.setdefault(name, []).append((dt.date.fromisoformat(day), float(value)))
    return out


def render_line_chart_svg(series: Sequence[PlotSeries], title: str, y_label: str) -> str:
    """Minimal static line chart: axes, legend, one polyline per series."""
    if not series or all(len(s.dates) == 0 for s in series):
        raise EmptyInput("no plot series")
    width, height = 800.0, 480.0
    left, right, top, bottom = 70.0, 20.0, 40.0, 40.0
    plot_w = width - left - right
    plot_h = height - top - bottom

    all_dates = sorted({d for s in series for d in s.dates})
    x0, x1 = all_dates[0].toordinal(), all_dates[-1].toordinal()
    span_x = max(x1 - x0, 1)
    all_values = [v for s in series for v in s.values]
    y_min, y_max = min(all_values), max(all_values)
    if y_max == y_min:
        y_min -= 1.0
        y_max += 1.0
    pad = 0.05 * (y_max - y_min)
    y_min -= pad
    y_max += pad

    def x_at(day: dt.date) -> float:
        return left + plot_w * (day.toordinal() - x0) / span_x

    def y_at(value: float) -> float:
        return top + plot_h * (1.0 - (value - y_min) / (y_max - y_min))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{title}</text>',
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left:.1f}" y2="{top + plot_h:.1f}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{left:.1f}" y1="{top + plot_h:.1f}" x2="{left + plot_w:.1f}" '
        f'y2="{top + plot_h:.1f}" stroke="black" stroke-width="1"/>',
        f'<text x="14" y="{top + plot_h / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="11" transform="rotate(-90 14 {top + plot_h / 2:.1f})">{y_label}</text>',
    ]
    for i in range(5):
        frac = i / 4.0
        value = y_min + frac * (y_max - y_min)
        y = y_at(value)
        parts.append(
            f'<line x1="{left - 4:.1f}" y1="{y:.2f}" x2="{left:.1f}" y2="{y:.2f}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 8:.1f}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{value:.4g}</text>'
        )
    for day in (all_dates[0], all_dates[-1]):
        x = x_at(day)
        parts.append(
            f'<text x="{x:.2f}" y="{top + plot_h + 16:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{day.isoformat()}</text>'
        )
    for idx, s in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(f"{x_at(d):.2f},{y_at(v):.2f}" for d, v in zip(s.dates, s.values))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        ly = top + 14.0 * idx
        parts.append(
            f'<line x1="{left + plot_w - 150:.1f}" y1="{ly + 6:.1f}" '
            f'x2="{left + plot_w - 130:.1f}" y2="{ly + 6:.1f}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{left + plot_w - 126:.1f}" y="{ly + 10:.1f}" font-family="sans-serif" '
            f'font-size="10">{s.name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
