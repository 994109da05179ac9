import pytest

from breakclause.config import MarketConfig
from breakclause.presets import FLAT_MARKET, SLOPED_MARKET
from breakclause.scenarios import swap_market

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def flat_market():
    return swap_market(FLAT_MARKET, 4.0, 2)


@pytest.fixture(scope="session")
def sloped_market():
    return swap_market(SLOPED_MARKET, 4.0, 2)


@pytest.fixture
def record_criterion():
    def record(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
