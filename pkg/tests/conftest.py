import pytest

CRITERIA: dict[str, str] = {}


@pytest.fixture
def report():
    def record(key: str, ok: bool, detail: str) -> bool:
        CRITERIA[key] = f"{key}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(CRITERIA[key])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: (len(k.split()[0]), k)):
        terminalreporter.write_line(CRITERIA[key])
