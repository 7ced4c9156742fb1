import pytest

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance():
    def record(key, ok, detail):
        ACCEPTANCE_LINES[key] = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}"
        print(ACCEPTANCE_LINES[key])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.rstrip("ab")), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
