import numpy as np
import pytest
from hypothesis import strategies as st

from flexstiff.geometry import UM, RssParams

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def ref_params():
    return RssParams()


def random_params(rng, n_max=4):
    """Valid RssParams drawn around the reference design."""
    return RssParams(
        n_meanders=int(rng.integers(1, n_max + 1)),
        l1=rng.uniform(10, 80) * UM,
        l2=rng.uniform(15, 90) * UM,
        l3=rng.uniform(3, 15) * UM,
        l4=rng.uniform(3, 15) * UM,
        l5=rng.uniform(5, 30) * UM,
        w_o=rng.uniform(10, 60) * UM,
        w_p=rng.uniform(1.5, 6) * UM,
        w_pc=rng.uniform(1.5, 6) * UM,
        thickness=rng.uniform(10, 50) * UM,
        youngs_modulus=rng.uniform(130, 190) * 1e9,
    )


rss_params = st.builds(
    RssParams,
    n_meanders=st.integers(1, 4),
    l1=st.floats(10, 80).map(lambda v: v * UM),
    l2=st.floats(15, 90).map(lambda v: v * UM),
    l3=st.floats(3, 15).map(lambda v: v * UM),
    l4=st.floats(3, 15).map(lambda v: v * UM),
    l5=st.floats(5, 30).map(lambda v: v * UM),
    w_o=st.floats(10, 60).map(lambda v: v * UM),
    w_p=st.floats(1.5, 6).map(lambda v: v * UM),
    w_pc=st.floats(1.5, 6).map(lambda v: v * UM),
    thickness=st.floats(10, 50).map(lambda v: v * UM),
    youngs_modulus=st.floats(130e9, 190e9),
)


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.abs(a - b).max() / np.abs(b).max())
