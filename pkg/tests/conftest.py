from __future__ import annotations

import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spectracert.io import load_example

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def disk():
    return load_example("disk")


@pytest.fixture(scope="session")
def square():
    return load_example("square")


@pytest.fixture(scope="session")
def segment():
    return load_example("segment")


@pytest.fixture(scope="session")
def singleton():
    return load_example("singleton")


@pytest.fixture(scope="session")
def interval():
    return load_example("interval")


@pytest.fixture(scope="session")
def ball3():
    return load_example("ball3")


def circle(theta):
    return np.array([np.cos(theta), np.sin(theta)])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "CRITERIA_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
