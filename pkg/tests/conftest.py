import pytest

VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line: ``criterion N: STATUS  detail``."""

    def record(criterion, status, detail=""):
        line = f"criterion {criterion}: {status}  {detail}".rstrip()
        VERDICTS.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
