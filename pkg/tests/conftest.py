import sys

import numpy as np
import pytest

from deformqm.metric import UNIFORM_IN_U, DeformationContext, make_grid

TAU_PANEL = (0.1, 0.5, 0.9)


@pytest.fixture(scope="session")
def grids():
    """Uniform-in-u grids keyed by (tau, n); built once per session."""
    cache = {}

    def get(tau, n=512, window=None):
        key = (tau, n, window)
        if key not in cache:
            cache[key] = make_grid(DeformationContext(tau), n, UNIFORM_IN_U, window)
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
