import os

import pytest
from hypothesis import HealthCheck, settings

from chabauty.cli import EXAMPLE_CONFIG, load_config

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def example():
    """The shipped X0(67)+ configuration and fixture bundle."""
    return load_config(EXAMPLE_CONFIG)


@pytest.fixture(scope="session")
def main_disk(example):
    return example.disk_context((0, 6))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
