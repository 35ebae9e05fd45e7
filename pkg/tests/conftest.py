import sys
import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

TOL = 1e-10


def unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@st.composite
def complex_unit_vectors(draw, dim: int):
    parts = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=2 * dim, max_size=2 * dim))
    v = np.array(parts[:dim]) + 1j * np.array(parts[dim:])
    n = np.linalg.norm(v)
    if n < 1e-3:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1
        return v
    return v / n


angles = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
