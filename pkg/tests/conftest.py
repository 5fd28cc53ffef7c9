import pytest

ACCEPTANCE = []


@pytest.fixture
def verdict():
    """Record one acceptance line: verdict(label, passed, detail)."""

    def record(label, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'} {label}" + (f": {detail}" if detail else "")
        ACCEPTANCE.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
