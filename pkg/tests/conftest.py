import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sparerepair.network import reference_network  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def n0():
    return reference_network()


@pytest.fixture
def verdict():
    """Record one acceptance line; shown in the terminal summary."""

    def record(criterion: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
