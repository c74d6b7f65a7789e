import datetime as dt
import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from signalfuse.errors import BeyondCalendar, DataError, EmptyGroup, LagOutOfRange, MissingColumn
from signalfuse.market_data import ClassSeries
from signalfuse.news import (
    DailySentiment,
    SentimentRecord,
    assign_trading_day,
    clean_article,
    clean_news,
    daily_sentiments,
    extract_embedded_date,
    join_sentiment_returns,
    parse_news_csv,
    parse_sentiment_csv,
    vote_daily,
)

D = dt.date
TS = dt.datetime


def weekday_calendar(start, n):
    days = []
    cur = start
    while len(days) < n:
        if cur.weekday() < 5:
            days.append(cur)
        cur += dt.timedelta(days=1)
    return days


class TestCleanArticle:
    def test_marker_rule(self):
        assert clean_article("Markets rallied. Copyright 2024 Dow Jones") == "Markets rallied."

    def test_no_marker_identity_modulo_whitespace(self):
        text = "Stocks  rose\n\nsharply today."
        assert clean_article(text) == "Stocks rose sharply today."

    def test_earliest_of_two_markers(self):
        text = "Intro. Photo by Someone. More text. Copyright 2024."
        # Oracle: truncation point is the minimum of the marker positions.
        cut = min(text.find("Photo by"), text.find("Copyright"))
        assert clean_article(text) == text[:cut].strip()

    def test_empty(self):
        assert clean_article("") == ""

    def test_result_is_prefix_reduction(self):
        text = "A  B Write to nobody. C"
        out = clean_article(text)
        assert out == "A B"


class TestExtractEmbeddedDate:
    def test_newswire_stamp(self):
        raw = "...(END) Dow Jones Newswires May 10, 2024 16:12 ET..."
        assert extract_embedded_date(raw) == D(2024, 5, 10)

    def test_absent(self):
        assert extract_embedded_date("no dates here") is None

    PLANTED = [
        ("Report filed May 10, 2024 in New York", D(2024, 5, 10)),
        ("Deadline of 2024-05-13 applies", D(2024, 5, 13)),
        ("As of 05/14/2024 the rule holds", D(2024, 5, 14)),
        ("January 2, 2023 opening bell", D(2023, 1, 2)),
        ("Seen on Feb 29, 2024 only", D(2024, 2, 29)),
        ("Back on 12/31/1999 markets parted", D(1999, 12, 31)),
        ("Filed 2020-02-29 leap day", D(2020, 2, 29)),
        ("Note from Sept 5, 2021 archive", D(2021, 9, 5)),
        ("Dated March 15, 2022.", D(2022, 3, 15)),
        ("At 9/9/2019 nothing happened", D(2019, 9, 9)),
        ("Earliest May 1, 2024 then 2024-06-01 later", D(2024, 5, 1)),
        ("ISO first 2024-06-01 then May 1, 2024", D(2024, 6, 1)),
        ("Oct. 7, 2022 with a period", D(2022, 10, 7)),
        ("Ends December 25, 2020 holiday", D(2020, 12, 25)),
        ("Slash 01/02/2003 early", D(2003, 1, 2)),
        ("April 01, 2024 zero-padded day", D(2024, 4, 1)),
        ("Two dates 07/04/2024 and 07/05/2024", D(2024, 7, 4)),
        ("It was Jun 30, 2023 quarter end", D(2023, 6, 30)),
        ("Aug 07, 2024 session recap", D(2024, 8, 7)),
        ("The 2021-11-30 print stands", D(2021, 11, 30)),
    ]

    @pytest.mark.parametrize("raw,expected", PLANTED)
    def test_hand_labeled_fixture(self, raw, expected):
        assert extract_embedded_date(raw) == expected

    def test_invalid_calendar_dates_skipped(self):
        assert extract_embedded_date("due 99/99/2024 then 2024-05-10") == D(2024, 5, 10)
        assert extract_embedded_date("Feb 30, 2023 is fake, Mar 1, 2023 is real") == D(2023, 3, 1)


class TestAssignTradingDay:
    CAL = weekday_calendar(D(2024, 5, 6), 15)  # 2024-05-06 .. 2024-05-24

    def test_after_close_rolls_forward(self):
        assert assign_trading_day(TS(2024, 5, 14, 16, 30), self.CAL) == D(2024, 5, 15)

    def test_at_close_boundary_rolls(self):
        assert assign_trading_day(TS(2024, 5, 14, 16, 0), self.CAL) == D(2024, 5, 15)

    def test_saturday_rolls_to_monday(self):
        assert assign_trading_day(TS(2024, 5, 11, 9, 0), self.CAL) == D(2024, 5, 13)

    def test_sunday_rolls_to_monday(self):
        assert assign_trading_day(TS(2024, 5, 12, 20, 0), self.CAL) == D(2024, 5, 13)

    def test_in_session_same_day(self):
        assert assign_trading_day(TS(2024, 5, 14, 10, 0), self.CAL) == D(2024, 5, 14)

    def test_non_trading_weekday_rolls(self):
        cal = [D(2024, 5, 14), D(2024, 5, 16)]
        assert assign_trading_day(TS(2024, 5, 15, 10, 0), cal) == D(2024, 5, 16)

    def test_beyond_calendar(self):
        with pytest.raises(BeyondCalendar):
            assign_trading_day(TS(2024, 5, 24, 17, 0), self.CAL)

    def test_aware_timestamp_converted(self):
        from zoneinfo import ZoneInfo

        # 20:30 UTC == 16:30 ET in May (EDT): after the close, rolls forward.
        ts = TS(2024, 5, 14, 20, 30, tzinfo=ZoneInfo("UTC"))
        assert assign_trading_day(ts, self.CAL) == D(2024, 5, 15)

    @given(
        st.datetimes(
            min_value=TS(2024, 5, 6), max_value=TS(2024, 5, 23, 23, 59)
        )
    )
    def test_output_on_or_after_input_and_in_calendar(self, ts):
        day = assign_trading_day(ts, self.CAL)
        assert day >= ts.date()
        assert day in self.CAL


def record(label, minute, source="WSJ", model="gpt2"):
    return SentimentRecord(TS(2024, 5, 14, 10, minute), source, model, label)


class TestVoteDaily:
    DAY = D(2024, 5, 14)

    def test_strict_mode(self):
        out = vote_daily([record(1, 0), record(1, 1), record(0, 2)], self.DAY)
        assert out.label == 1
        assert out.vote_counts == {1: 2, 0: 1}

    def test_tie_breaks_to_first(self):
        out = vote_daily([record(1, 0), record(-1, 1)], self.DAY)
        assert out.label == 1
        assert out.first_label == 1

    def test_three_way_tie_first_neutral(self):
        out = vote_daily([record(0, 0), record(1, 1), record(-1, 2)], self.DAY)
        assert out.label == 0

    def test_empty_group(self):
        with pytest.raises(EmptyGroup):
            vote_daily([], self.DAY)

    @pytest.mark.parametrize("labels", list(itertools.product([-1, 0, 1], repeat=3)))
    def test_all_three_label_sequences_match_rule_oracle(self, labels):
        out = vote_daily([record(lab, i) for i, lab in enumerate(labels)], self.DAY)
        counts = {c: labels.count(c) for c in set(labels)}
        top = max(counts.values())
        tied = [c for c, n in counts.items() if n == top]
        expected = tied[0] if len(tied) == 1 else (labels[0] if labels[0] in tied else 0)
        assert out.label == expected

    @given(st.lists(st.sampled_from([-1, 0, 1]), min_size=1, max_size=9))
    def test_permutation_invariant_without_tie(self, labels):
        base = vote_daily([record(lab, i) for i, lab in enumerate(labels)], self.DAY)
        counts = {c: labels.count(c) for c in set(labels)}
        top = max(counts.values())
        tied = [c for c, n in counts.items() if n == top]
        rotated = labels[1:] + labels[:1]
        out = vote_daily([record(lab, i) for i, lab in enumerate(rotated)], self.DAY)
        if len(tied) == 1:
            assert out.label == base.label
        elif rotated[0] not in tied and labels[0] not in tied:
            assert out.label == base.label  # both fall back to neutral


def daily_map(entries):
    """entries: {(source, model): {day: label}} -> DailySentiment mapping."""
    out = {}
    for key, by_day in entries.items():
        out[key] = {
            day: DailySentiment(day, key[0], key[1], label, {label: 1}, label)
            for day, label in by_day.items()
        }
    return out


class TestJoin:
    def test_lag_zero_single_day(self):
        day = D(2024, 5, 14)
        classes = ClassSeries((day,), (1,))
        daily = daily_map({("WSJ", "gpt2"): {day: 1}})
        ds = join_sentiment_returns(daily, classes, 0, calendar=[day])
        assert len(ds) == 1
        assert ds.rows[0].sentiments[("WSJ", "gpt2")] == 1
        assert ds.rows[0].return_class == 1

    def test_lag_one_three_day_calendar(self):
        cal = weekday_calendar(D(2024, 5, 13), 3)
        d1, d2, d3 = cal
        classes = ClassSeries((d2, d3), (1, -1))
        daily = daily_map({("WSJ", "gpt2"): {d1: -1, d2: 1}})
        ds = join_sentiment_returns(daily, classes, 1, calendar=cal)
        # sentiment(d1) pairs class(d2); sentiment(d2) pairs class(d3)
        assert ds.rows[0].trading_day == d2
        assert ds.rows[0].sentiments[("WSJ", "gpt2")] == -1
        assert ds.rows[1].sentiments[("WSJ", "gpt2")] == 1

    def test_missing_days_neutral_and_flagged(self):
        cal = weekday_calendar(D(2024, 5, 13), 3)
        classes = ClassSeries(tuple(cal[1:]), (1, -1))
        daily = daily_map({("WSJ", "gpt2"): {cal[1]: 1}})
        ds = join_sentiment_returns(daily, classes, 1, calendar=cal)
        assert ds.rows[0].missing[("WSJ", "gpt2")] is True
        assert ds.rows[0].sentiments[("WSJ", "gpt2")] == 0
        assert ds.rows[1].missing[("WSJ", "gpt2")] is False

    def test_lag_out_of_range(self):
        day = D(2024, 5, 14)
        with pytest.raises(LagOutOfRange):
            join_sentiment_returns({}, ClassSeries((day,), (0,)), 3, calendar=[day])

    def test_random_fixture_matches_double_loop_oracle(self):
        import random

        rnd = random.Random(42)
        cal = weekday_calendar(D(2024, 3, 1), 30)
        classes = ClassSeries(tuple(cal[1:]), tuple(rnd.choice([-1, 0, 1]) for _ in cal[1:]))
        by_day = {day: rnd.choice([-1, 0, 1]) for day in cal if rnd.random() < 0.7}
        daily = daily_map({("Benzinga", "finbert"): by_day})
        k = 2
        ds = join_sentiment_returns(daily, classes, k, calendar=cal)

        assert len(ds) == len(classes)
        for row in ds.rows:
            # Brute-force scan: walk the calendar to find the k-back position.
            pos = None
            for i, day in enumerate(cal):
                if day == row.trading_day:
                    pos = i
                    break
            want_missing = pos - k < 0 or cal[pos - k] not in by_day
            assert row.missing[("Benzinga", "finbert")] == want_missing
            expected = 0 if want_missing else by_day[cal[pos - k]]
            assert row.sentiments[("Benzinga", "finbert")] == expected

    def test_signal_series_export(self):
        day = D(2024, 5, 14)
        classes = ClassSeries((day,), (1,))
        daily = daily_map({("WSJ", "gpt2"): {day: -1}})
        ds = join_sentiment_returns(daily, classes, 0, calendar=[day])
        series = ds.signal_series("WSJ", "gpt2")
        assert series.values == (-1,)
        assert series.source == "sent:gpt2:WSJ"


class TestCsvContracts:
    def test_parse_news_roundtrip(self, fixtures_dir):
        text = (fixtures_dir / "news_sample.csv").read_text(encoding="utf-8")
        articles = parse_news_csv(text)
        assert len(articles) == 6
        assert articles[0].source == "DowJones"
        assert articles[3].timestamp is None  # blank timestamp preserved for repair

    def test_clean_news_pipeline(self, fixtures_dir):
        text = (fixtures_dir / "news_sample.csv").read_text(encoding="utf-8")
        cleaned, stats = clean_news(parse_news_csv(text))
        assert stats.dropped_keyword == 1  # the Amundi row
        assert stats.repaired_timestamp == 1  # embedded May 13, 2024
        assert stats.kept == 5
        by_title = {a.title: a for a in cleaned}
        assert "Copyright" not in by_title["Futures rise ahead of data"].text
        repaired = by_title["Earnings roundup"]
        assert repaired.timestamp == TS(2024, 5, 13, 0, 0)

    def test_unknown_source_rejected(self):
        text = "timestamp_et,source,title,text\n2024-05-10 09:00,Reuters,t,x\n"
        with pytest.raises(DataError, match="row 1"):
            parse_news_csv(text)

    def test_missing_column(self):
        with pytest.raises(MissingColumn):
            parse_news_csv("timestamp_et,source,title\n")

    def test_parse_sentiment(self):
        text = (
            "timestamp_et,source,model,label,score\n"
            "2024-05-10 09:15,DowJones,gpt2,1,0.91\n"
            "2024-05-10 10:00,WSJ,finbert,-1,\n"
        )
        records = parse_sentiment_csv(text)
        assert records[0].label == 1 and records[0].score == pytest.approx(0.91)
        assert records[1].score is None

    def test_sentiment_label_out_of_range(self):
        text = "timestamp_et,source,model,label,score\n2024-05-10 09:15,WSJ,gpt2,2,\n"
        with pytest.raises(DataError, match="row 1"):
            parse_sentiment_csv(text)

    def test_sentiment_score_out_of_range(self):
        text = "timestamp_et,source,model,label,score\n2024-05-10 09:15,WSJ,gpt2,1,1.5\n"
        with pytest.raises(DataError, match="row 1"):
            parse_sentiment_csv(text)


class TestDailySentiments:
    def test_groups_and_skips_beyond_calendar(self):
        cal = weekday_calendar(D(2024, 5, 13), 3)
        records = [
            SentimentRecord(TS(2024, 5, 13, 9, 0), "WSJ", "gpt2", 1),
            SentimentRecord(TS(2024, 5, 13, 17, 0), "WSJ", "gpt2", -1),  # rolls to 05-14
            SentimentRecord(TS(2024, 5, 15, 17, 0), "WSJ", "gpt2", 1),  # beyond: skipped
            SentimentRecord(TS(2024, 5, 13, 9, 0), "Benzinga", "finbert", 0),
        ]
        grouped = daily_sentiments(records, cal)
        assert grouped[("WSJ", "gpt2")][D(2024, 5, 13)].label == 1
        assert grouped[("WSJ", "gpt2")][D(2024, 5, 14)].label == -1
        assert D(2024, 5, 15) not in grouped[("WSJ", "gpt2")]
        assert grouped[("Benzinga", "finbert")][D(2024, 5, 13)].label == 0
