import numpy as np
import pytest

from uavmon.traces import GeoPoint, GridSpec, TraceSample


@pytest.fixture
def grid4():
    return GridSpec(10_000.0, 10_000.0, 4, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def stationary_trace(aid, pos, rounds):
    return [TraceSample(aid, r, GeoPoint(*pos)) for r in rounds]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
