import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from helpers import CRITERIA_LINES  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERIA_LINES:
        terminalreporter.write_line(line)
