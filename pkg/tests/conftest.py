import pytest

from swiptsec.sysmodel import table1_config

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def cfg():
    return table1_config()


@pytest.fixture
def fig34_cfg():
    return table1_config(d_user=(11.0, 13.0, 16.0, 18.0), d_eve=15.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
