"""Shared test plumbing: the acceptance checklist summary block.

test_acceptance.py records one line per checklist item through
record_criterion; the hook below repeats them in the terminal summary so the
pass/fail status of every item is visible in a plain ``pytest -v`` run even
though stdout of passing tests is captured.
"""

_ACCEPTANCE_LINES: list = []


def record_criterion(number: int, passed: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} [{detail}]"
    _ACCEPTANCE_LINES.append((number, line))
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance checklist")
    for _, line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
