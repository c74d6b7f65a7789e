import datetime as dt
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from signalfuse.errors import InvalidComponent, SignalPriceMismatch, TooShort
from signalfuse.signals import SignalSeries
from signalfuse.strategy import (
    buy_and_hold,
    cash_return,
    combine_signals,
    simulate,
    strategy_return,
)

from helpers import make_series

DAY = dt.date(2024, 5, 10)


def naive_replay(adj_closes, signal_values, capital=10_000.0):
    """Second, independent all-in/all-out implementation (the oracle)."""
    state = {"cash": capital, "shares": 0.0}
    rows = []
    for price, sig in zip(adj_closes, signal_values):
        if sig == 1 and state["cash"] > 0:
            state = {"cash": 0.0, "shares": state["cash"] / price}
        elif sig == -1 and state["shares"] > 0:
            state = {"cash": state["shares"] * price, "shares": 0.0}
        rows.append((state["cash"], state["shares"], state["cash"] + state["shares"] * price))
    return rows


def signals_for(series, values):
    return SignalSeries(series.dates(), tuple(values), source="test")


class TestCombine:
    def test_sign_of_sum(self):
        assert combine_signals({"a": 1, "b": 1, "c": -1}, DAY).value == 1

    def test_zero_sum_holds(self):
        assert combine_signals({"a": 1, "b": -1}, DAY).value == 0

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exhaustive_matches_sign_oracle(self, n):
        for combo in itertools.product([-1, 0, 1], repeat=n):
            components = {f"s{i}": v for i, v in enumerate(combo)}
            got = combine_signals(components, DAY).value
            total = sum(combo)
            expected = 0 if total == 0 else int(np.sign(total))
            assert got == expected
            assert got in (-1, 0, 1)

    def test_invalid_component(self):
        with pytest.raises(InvalidComponent):
            combine_signals({"a": 2}, DAY)

    @given(st.lists(st.sampled_from([-1, 0, 1]), min_size=1, max_size=6))
    def test_permutation_invariant(self, values):
        forward = combine_signals({f"s{i}": v for i, v in enumerate(values)}, DAY).value
        backward = combine_signals(
            {f"s{i}": v for i, v in enumerate(reversed(values))}, DAY
        ).value
        assert forward == backward


class TestSimulate:
    def test_never_trades(self):
        series = make_series([100.0, 101.0, 99.0])
        curve = simulate(series, signals_for(series, [0, 0, 0]))
        assert strategy_return(curve) == 0.0
        assert curve.states[-1].cash == 10_000.0

    def test_buy_then_sell_forced(self):
        series = make_series([100.0, 110.0])
        curve = simulate(series, signals_for(series, [1, -1]))
        assert curve.states[0].shares == pytest.approx(100.0)
        assert curve.states[-1].cash == pytest.approx(11_000.0)
        assert strategy_return(curve) == pytest.approx(0.10)

    def test_value_conserved_at_trades(self):
        rng = np.random.default_rng(6)
        closes = 100 * np.exp(np.cumsum(rng.normal(0, 0.01, 63)))
        series = make_series(list(closes))
        values = [int(v) for v in rng.choice([-1, 0, 1], 63)]
        curve = simulate(series, signals_for(series, values))
        prev = None
        for state in curve.states:
            if prev is not None:
                # Any change in holdings happened at today's price: the value
                # at today's price computed from yesterday's holdings matches.
                before = prev.cash + prev.shares * state.price
                assert state.value == pytest.approx(before, rel=1e-9)
            prev = state

    def test_all_in_all_out(self):
        rng = np.random.default_rng(7)
        closes = 100 * np.exp(np.cumsum(rng.normal(0, 0.01, 40)))
        series = make_series(list(closes))
        values = [int(v) for v in rng.choice([-1, 1], 40)]
        curve = simulate(series, signals_for(series, values))
        for state in curve.states:
            assert min(state.cash, state.shares) == 0.0

    def test_always_long_equals_buy_and_hold_exactly(self):
        series = make_series([100.0, 104.0, 98.0, 103.0])
        curve = simulate(series, signals_for(series, [1, 1, 1, 1]))
        hold = buy_and_hold(series)
        for a, b in zip(curve.states, hold.states):
            assert (a.cash, a.shares, a.value) == (b.cash, b.shares, b.value)

    def test_determinism(self):
        series = make_series([100.0, 102.0, 101.0])
        one = simulate(series, signals_for(series, [1, 0, -1]))
        two = simulate(series, signals_for(series, [1, 0, -1]))
        assert one == two

    def test_date_mismatch(self):
        series = make_series([100.0, 101.0])
        bad = SignalSeries((series.dates()[0],), (1,), source="test")
        with pytest.raises(SignalPriceMismatch):
            simulate(series, bad)

    def test_oracle_equivalence_1000_randomized_fixtures(self):
        rng = np.random.default_rng(63)
        for _ in range(1000):
            closes = 100 * np.exp(np.cumsum(rng.normal(0.0, 0.012, 63)))
            values = [int(v) for v in rng.choice([-1, 0, 1], 63)]
            series = make_series(list(closes))
            curve = simulate(series, signals_for(series, values))
            expected = naive_replay(closes, values)
            for state, (cash, shares, value) in zip(curve.states, expected):
                assert state.cash == pytest.approx(cash, abs=1e-9)
                assert state.shares == pytest.approx(shares, abs=1e-9)
                assert state.value == pytest.approx(value, abs=1e-9)

    def test_cost_parameter_departs_from_zero_cost_path(self):
        series = make_series([100.0, 110.0])
        costless = simulate(series, signals_for(series, [1, -1]), cost=0.0)
        costly = simulate(series, signals_for(series, [1, -1]), cost=0.001)
        assert strategy_return(costly) < strategy_return(costless)


class TestBuyAndHold:
    def test_flat_prices(self):
        series = make_series([100.0] * 5)
        curve = buy_and_hold(series)
        assert list(curve.returns()) == [0.0] * 5

    def test_final_return_is_price_ratio(self):
        rng = np.random.default_rng(8)
        closes = list(100 * np.exp(np.cumsum(rng.normal(0, 0.01, 30))))
        curve = buy_and_hold(make_series(closes))
        assert strategy_return(curve) == pytest.approx(closes[-1] / closes[0] - 1, abs=1e-12)

    def test_too_short(self):
        with pytest.raises(TooShort):
            buy_and_hold(make_series([100.0]))

    def test_gspc_window_benchmark(self, gspc_window):
        curve = buy_and_hold(gspc_window)
        assert strategy_return(curve) * 100 == pytest.approx(-0.696, abs=0.05)


class TestReturns:
    def test_zero_when_value_unchanged(self):
        series = make_series([100.0, 100.0])
        curve = simulate(series, signals_for(series, [0, 0]))
        assert strategy_return(curve) == 0.0

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(9)
        closes = list(100 * np.exp(np.cumsum(rng.normal(0, 0.01, 20))))
        series = make_series(closes)
        values = [int(v) for v in rng.choice([-1, 0, 1], 20)]
        curve = simulate(series, signals_for(series, values))
        final = curve.states[-1]
        expected = (final.cash + final.shares * final.price - 10_000.0) / 10_000.0
        assert strategy_return(curve) == pytest.approx(expected, abs=1e-15)

    def test_cash_return_degenerate_while_holding(self):
        series = make_series([100.0, 120.0])
        curve = simulate(series, signals_for(series, [1, 0]))
        assert cash_return(curve) == pytest.approx(-1.0)  # all capital in shares
        assert strategy_return(curve) == pytest.approx(0.20)
