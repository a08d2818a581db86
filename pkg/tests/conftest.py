import warnings

import pytest

from wvamp.quantum import FirstOrderWarning

ACCEPTANCE_LINES = []


@pytest.fixture
def quiet_first_order():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FirstOrderWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
