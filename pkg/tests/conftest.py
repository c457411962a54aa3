import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number: int, name: str, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
