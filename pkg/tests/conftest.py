import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from suffcause import OutcomeTable, Population

settings.register_profile(
    "default", max_examples=200, derandomize=True, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=2000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).resolve().parents[1] / "src" / "suffcause" / "data"


@pytest.fixture
def bladder_path():
    return DATA / "table1_bladder.csv"


@pytest.fixture
def two_person_path():
    return DATA / "table2_outcomes.csv"


@st.composite
def tables(draw, k=None, min_k=1, max_k=3):
    if k is None:
        k = draw(st.integers(min_k, max_k))
    bits = draw(st.lists(st.integers(0, 1), min_size=1 << k, max_size=1 << k))
    return OutcomeTable(k, tuple(bits))


@st.composite
def populations(draw, k=None, max_k=3, max_size=3):
    if k is None:
        k = draw(st.integers(1, max_k))
    n = draw(st.integers(1, max_size))
    ts = [draw(tables(k=k)) for _ in range(n)]
    return Population.of(ts)


def random_population(rng, k, size):
    ts = [OutcomeTable(k, tuple(int(x) for x in rng.integers(0, 2, 1 << k))) for _ in range(size)]
    return Population.of(ts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
