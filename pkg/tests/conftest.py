import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# "criterion N: PASS|FAIL ..." lines, echoed after the run even under capture
VERDICTS: list = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
