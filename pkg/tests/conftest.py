"""Shared fixtures and the acceptance-summary reporting hook."""

import numpy as np
import pytest
from hypothesis import settings

from renewalthin import (
    TimeGrid,
    density_from_masses,
    Exponential,
    Gamma,
    Uniform,
    Periodic,
    AntibunchShaped,
)

settings.register_profile("suite", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("suite")


def smoothed_point_mass(grid, at=1.0):
    """Point mass at `at` spread over three adjacent bins (1/4, 1/2, 1/4)."""
    m = int(round(at / grid.dt))
    masses = np.zeros(grid.n)
    masses[m - 1] = 0.25
    masses[m] = 0.5
    masses[m + 1] = 0.25
    return density_from_masses(grid, masses)


@pytest.fixture
def grid():
    return TimeGrid(4096, 0.0625)


@pytest.fixture
def classifier_corpus(grid):
    """The soundness corpus: smooth laws plus a smoothed point mass."""
    return {
        "exponential": Exponential(1.0).density(grid),
        "gamma2": Gamma(2.0, 2.0).density(grid),
        "uniform": Uniform(0.5, 1.5).density(grid),
        "smoothed_point_mass": smoothed_point_mass(grid),
    }


@pytest.fixture
def source_laws():
    return {
        "exponential": Exponential(1.0),
        "gamma2": Gamma(2.0, 2.0),
        "uniform": Uniform(0.5, 1.5),
        "periodic": Periodic(1.0),
        "antibunch": AntibunchShaped(5.0, 1.0),
    }


# ---------------------------------------------------------------------------
# Acceptance summary: tests in test_acceptance.py record one line per
# criterion; the lines are echoed after the run so pass/fail status is
# visible without -s.

ACCEPTANCE_LINES = []


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
