import numpy as np
import pytest

from qwdirac.lattice import Lattice
from qwdirac.properties import random_angles, random_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_walk(rng):
    lat = Lattice(24, 3.0)
    return lat, random_angles(rng, lat.n, 6), random_state(rng, lat)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
