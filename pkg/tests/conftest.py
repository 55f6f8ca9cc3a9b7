import sys

import numpy as np
import pytest

from walkergeom.metric import WalkerMetric


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def m1():
    return WalkerMetric.from_strings("x1^2", "x2^2", "x1*x2")


@pytest.fixture
def flat():
    return WalkerMetric.from_strings("0", "0", "0")


@pytest.fixture
def strict_x4():
    return WalkerMetric.from_strings("x4^2", "0", "0")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {mod.TITLES[n]} ({detail})")
