from __future__ import annotations

import pytest
from hypothesis import settings

from expcomplex.multival import PathSpec, continue_along

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def state():
    """Branch state at 0.3 + 0.4i along the straight path from 1/2, depth 5."""
    return continue_along(PathSpec.straight(0.5, complex(0.3, 0.4)), 5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
