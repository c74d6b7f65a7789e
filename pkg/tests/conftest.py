import csv
from pathlib import Path

import pytest

from signalfuse.market_data import parse_price_csv

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def gspc_window_text() -> str:
    return (FIXTURES / "gspc_2024_window.csv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def gspc_window(gspc_window_text):
    return parse_price_csv(gspc_window_text)


@pytest.fixture(scope="session")
def gspc_history():
    return parse_price_csv((FIXTURES / "gspc_history.csv").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def sar_fixture():
    return parse_price_csv((FIXTURES / "sar_rise_fall.csv").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def sar_golden():
    rows = list(csv.reader(open(FIXTURES / "sar_golden.csv", encoding="utf-8")))[1:]
    return [
        {
            "date": r[0],
            "sar": float(r[1]),
            "trend": r[2],
            "signal": None if r[3] == "" else int(r[3]),
        }
        for r in rows
    ]
