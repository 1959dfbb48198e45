import logging
import sys

import pytest
from hypothesis import settings

from risnoma import NetworkParams, simulate_gains

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_cancellation_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="risnoma.analytic")


@pytest.fixture(scope="session")
def defaults():
    return NetworkParams()


@pytest.fixture(scope="session")
def small_gains(defaults):
    return simulate_gains(defaults, 4000, seed=7)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
