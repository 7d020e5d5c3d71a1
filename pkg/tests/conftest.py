from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def scenario_dir():
    return ROOT / "scenarios"


def pytest_terminal_summary(terminalreporter):
    from tests.acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(LINES, key=lambda k: int(k.split()[1].rstrip(":"))):
            terminalreporter.write_line(LINES[key])
