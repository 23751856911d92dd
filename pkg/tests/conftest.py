import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record a one-line PASS/FAIL verdict for the terminal summary, then assert it."""

    def record(name, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'} {name}" + (f": {detail}" if detail else "")
        _VERDICTS.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
