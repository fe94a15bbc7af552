import math

import numpy as np
import pytest

from lindfringe.constants import gev_to_per_second
from lindfringe.fringe import InstrumentGeometry

ACCEPTANCE_LINES = []

# values quoted for the lithium experiment
LITHIUM_OMEGA = gev_to_per_second(0.20e-21)
LITHIUM_ALPHA = gev_to_per_second(0.3e-23)
LITHIUM_CONTRAST = 0.74
LITHIUM_T0 = 1e-3


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20021111)


@pytest.fixture
def geometry():
    # 400 nm standing-wave period
    return InstrumentGeometry(kappa=2 * math.pi / 400e-9, t0=LITHIUM_T0)


@pytest.fixture
def scan(geometry):
    return np.arange(50) * geometry.period / 50
