import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sica import load_fixture

settings.register_profile("sica", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("sica")


def positive_tables(max_i=6, max_j=6, lo=0.1, hi=100.0):
    shapes = st.tuples(st.integers(2, max_i), st.integers(2, max_j))
    return shapes.flatmap(lambda s: arrays(float, s, elements=st.floats(lo, hi)))


def sparse_tables(max_i=6, max_j=6):
    """Nonnegative tables with zeros but no empty line."""
    def fix(a):
        a = a.copy()
        a[:, 0] += 1.0
        a[0, :] += 1.0
        return a
    shapes = st.tuples(st.integers(2, max_i), st.integers(2, max_j))
    cells = st.one_of(st.just(0.0), st.floats(0.5, 50.0))
    return shapes.flatmap(lambda s: arrays(float, s, elements=cells)).map(fix)


@pytest.fixture(scope="session")
def rodent():
    return load_fixture("rodent")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "LINES", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[k])
