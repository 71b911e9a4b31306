import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from caustics import FourierSeries, SupportFunction, ellipse_support  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def ellipse():
    return ellipse_support()


@pytest.fixture
def wobbly():
    """A visibly non-circular but strictly convex table."""
    return SupportFunction.from_modes({0: 1.0, 2: 0.03, 3: 0.02 - 0.01j, 5: 0.004j}, K=6)


def random_real(rng, K, scale=0.5, start=1):
    modes = {k: scale * complex(rng.normal(), rng.normal()) / (1 + k) ** 2
             for k in range(start, K + 1)}
    return FourierSeries.from_modes(modes, K=K, real=True)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
