"""Shared test plumbing.

Acceptance tests record one human-readable pass/fail line each; the
terminal-summary hook replays them at the end of the run so they are
visible even when pytest captures stdout.
"""

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
