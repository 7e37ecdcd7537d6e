import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.register_profile("ci", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

MHZ = 2 * np.pi * 1e6
KHZ = 2 * np.pi * 1e3


@pytest.fixture
def tone():
    from ddphase.classical import ClassicalSignal

    return ClassicalSignal(0.12 * MHZ, MHZ, 0.0)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
