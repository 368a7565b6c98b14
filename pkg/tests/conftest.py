"""Shared pytest wiring.

ACCEPTANCE_LINES collects the one-line verdicts emitted by the acceptance
tests; the terminal-summary hook replays them at the end of the run so they
appear even under output capture.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
