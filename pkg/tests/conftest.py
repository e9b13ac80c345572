import os
import re
import sys

sys.path.insert(0, os.path.dirname(__file__))

_CRITERION_RE = re.compile(r"test_acceptance\.py::test_(c\d+)")


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, with any details the test recorded."""
    try:
        from test_acceptance import CRITERION_NOTES
    except Exception:
        CRITERION_NOTES = {}
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            match = _CRITERION_RE.search(report.nodeid)
            if match:
                criterion = match.group(1)
                note = CRITERION_NOTES.get(criterion, "")
                status = "PASS" if outcome == "passed" else "FAIL"
                lines[criterion] = f"{criterion.upper():>4} {status}  {note}"
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for criterion in sorted(lines, key=lambda c: int(c[1:])):
            terminalreporter.write_line(lines[criterion])
