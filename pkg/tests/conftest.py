import pytest

from grtorus import chambers as ch
from grtorus import pipeline as pl


@pytest.fixture(scope="session")
def dp5():
    return ch.dp5_decomposition()


@pytest.fixture(scope="session")
def certificate(dp5):
    return pl.contractibility_certificate(dp5)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
