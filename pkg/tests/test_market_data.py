import csv
import datetime as dt
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from signalfuse.errors import (
    DataError,
    DuplicateDate,
    InvalidThresholds,
    MissingColumn,
    NegativePrice,
    NonMonotonicDate,
    TooShort,
)
from signalfuse.market_data import (
    PriceBar,
    PriceSeries,
    ReturnSeries,
    compute_returns,
    label_returns,
    parse_price_csv,
    price_series_to_csv,
)

HEADER = "date,open,high,low,close,adj_close,volume\n"


from helpers import make_series  # noqa: E402


class TestParse:
    def test_empty_body(self):
        assert len(parse_price_csv(HEADER)) == 0

    def test_out_of_order_dates(self):
        text = HEADER + (
            "2024-01-03,1,2,0.5,1,1,10\n"
            "2024-01-02,1,2,0.5,1,1,10\n"
        )
        with pytest.raises(NonMonotonicDate, match="row 2"):
            parse_price_csv(text)

    def test_gspc_fixture_row_count(self, gspc_window):
        assert len(gspc_window) == 63
        assert gspc_window.bars[0].date == dt.date(2024, 5, 10)
        assert gspc_window.bars[-1].date == dt.date(2024, 8, 7)

    def test_missing_column(self):
        with pytest.raises(MissingColumn, match="adj_close"):
            parse_price_csv("date,open,high,low,close,volume\n")

    def test_duplicate_date(self):
        text = HEADER + (
            "2024-01-02,1,2,0.5,1,1,10\n"
            "2024-01-02,1,2,0.5,1,1,10\n"
        )
        with pytest.raises(DuplicateDate, match="row 2"):
            parse_price_csv(text)

    def test_negative_price(self):
        text = HEADER + "2024-01-02,1,2,-0.5,1,1,10\n"
        with pytest.raises(NegativePrice, match="row 1"):
            parse_price_csv(text)

    def test_unparsable_field_rejected(self):
        text = HEADER + "2024-01-02,1,2,0.5,oops,1,10\n"
        with pytest.raises(DataError, match="row 1"):
            parse_price_csv(text)

    def test_crlf_accepted(self):
        text = HEADER.replace("\n", "\r\n") + "2024-01-02,1,2,0.5,1,1,10\r\n"
        assert len(parse_price_csv(text)) == 1

    def test_round_trip(self, gspc_window):
        again = parse_price_csv(price_series_to_csv(gspc_window))
        assert again == gspc_window


class TestReturns:
    def test_unchanged_price(self):
        rs = compute_returns(make_series([100.0, 100.0]))
        assert rs.values == (0.0,)

    def test_forced_values(self):
        rs = compute_returns(make_series([100.0, 102.0, 96.9]))
        assert rs.values[0] == pytest.approx(0.02, abs=1e-12)
        assert rs.values[1] == pytest.approx(-0.05, abs=1e-12)

    def test_dates_shift_by_one(self):
        series = make_series([100.0, 101.0, 102.0])
        rs = compute_returns(series)
        assert rs.dates == series.dates()[1:]

    def test_too_short(self):
        with pytest.raises(TooShort):
            compute_returns(make_series([100.0]))

    def test_gspc_first_pair_vs_spreadsheet(self, gspc_window_text, gspc_window):
        # Independent recomputation straight from the raw document text.
        rows = list(csv.reader(io.StringIO(gspc_window_text)))
        first, second = float(rows[1][5]), float(rows[2][5])
        expected = second / first - 1.0
        rs = compute_returns(gspc_window)
        assert rs.values[0] == pytest.approx(expected, abs=1e-12)
        assert rs.dates[0] == dt.date(2024, 5, 13)

    def test_round_trip_integration(self, gspc_window):
        rs = compute_returns(gspc_window)
        adj = gspc_window.adj_closes()
        level = adj[0]
        for value, expected in zip(rs.values, adj[1:]):
            level = level * (1.0 + value)
            assert level == pytest.approx(expected, rel=1e-9)


class TestLabels:
    def test_paper_boundaries(self):
        rs = ReturnSeries(
            tuple(dt.date(2024, 1, i) for i in range(2, 6)),
            (0.011, 0.01, -0.01, -0.0101),
        )
        assert label_returns(rs).classes == (1, 0, 0, -1)

    def test_all_zero(self):
        rs = ReturnSeries((dt.date(2024, 1, 2), dt.date(2024, 1, 3)), (0.0, 0.0))
        assert label_returns(rs).classes == (0, 0)

    def test_invalid_thresholds(self):
        rs = ReturnSeries((dt.date(2024, 1, 2),), (0.0,))
        with pytest.raises(InvalidThresholds):
            label_returns(rs, pos_threshold=-0.01, neg_threshold=0.01)

    def test_gspc_frequencies_match_recount(self, gspc_window):
        rs = compute_returns(gspc_window)
        cs = label_returns(rs)
        oracle = [1 if r > 0.01 else (-1 if r < -0.01 else 0) for r in rs.values]
        assert list(cs.classes) == oracle
        assert len(cs) == len(rs)

    @given(st.lists(st.floats(-0.2, 0.2, allow_nan=False), min_size=1, max_size=60))
    def test_classes_in_range(self, values):
        rs = ReturnSeries(
            tuple(dt.date(2020, 1, 1) + dt.timedelta(days=i) for i in range(len(values))),
            tuple(values),
        )
        cs = label_returns(rs)
        assert set(cs.classes) <= {-1, 0, 1}
        assert len(cs) == len(rs)

    def test_idempotent_under_reparse(self, gspc_window):
        text = price_series_to_csv(gspc_window)
        first = label_returns(compute_returns(gspc_window))
        second = label_returns(compute_returns(parse_price_csv(text)))
        assert first == second


@given(
    st.lists(
        st.floats(min_value=1.0, max_value=1e5, allow_nan=False, allow_infinity=False),
        min_size=2,
        max_size=50,
    )
)
def test_return_integration_round_trip(adj_closes):
    series = make_series(adj_closes)
    rs = compute_returns(series)
    level = adj_closes[0]
    for value, expected in zip(rs.values, adj_closes[1:]):
        level = level * (1.0 + value)
        assert level == pytest.approx(expected, rel=1e-9)
