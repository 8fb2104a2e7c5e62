import pytest

# filled by tests/test_acceptance.py: label -> (passed, detail)
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, (ok, detail) in ACCEPTANCE_LINES.items():
        terminalreporter.write_line(f"criterion {label:<4} {'PASS' if ok else 'FAIL'}  {detail}")
