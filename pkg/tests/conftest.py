import pytest

acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_record():
    """Collects one PASS/FAIL line per acceptance criterion; the lines are
    echoed in the terminal summary and the test fails on a FAIL."""

    def record(criterion: int, passed: bool, detail: str) -> None:
        line = f"ACCEPTANCE {criterion:2d}: {'PASS' if passed else 'FAIL'}: {detail}"
        acceptance_lines.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(acceptance_lines):
            terminalreporter.write_line(line)
