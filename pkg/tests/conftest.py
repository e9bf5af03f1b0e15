import pytest

from magr.series import GappySeries

CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, passed, detail):
        CRITERIA.append((number, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    def order(item):
        label = str(item[0])
        head = label.split()[0]
        return int(head), label

    for number, passed, detail in sorted(CRITERIA, key=order):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")


@pytest.fixture
def table1():
    """Ten-step pair with x missing at t=5, 8 and y missing at t=4 (1-based)."""
    x = GappySeries([1.0, 2.0, 3.0, 4.0, None, 6.0, 7.0, None, 9.0, 10.0])
    y = GappySeries([0.5, -1.0, 2.5, None, 0.0, 1.5, -2.0, 3.0, 0.25, -0.75])
    return x, y
