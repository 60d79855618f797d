import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wergodic.groups import cyclic, dihedral, direct_product, quaternion, symmetric

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL_GROUPS = [
    cyclic(1), cyclic(2), cyclic(3), cyclic(4), cyclic(5), cyclic(6), cyclic(8), cyclic(12),
    dihedral(3), dihedral(4), dihedral(6), symmetric(3), quaternion(),
    direct_product(cyclic(2), cyclic(2)), direct_product(cyclic(2), cyclic(4)),
    direct_product(cyclic(3), cyclic(3)), direct_product(cyclic(2), symmetric(3)),
    symmetric(4),
]
ABELIAN_GROUPS = [G for G in SMALL_GROUPS if G.factors is not None]

groups_st = st.sampled_from(SMALL_GROUPS)
abelian_st = st.sampled_from(ABELIAN_GROUPS)


@st.composite
def subsets(draw, G, min_size=1):
    mask = draw(st.lists(st.booleans(), min_size=G.order, max_size=G.order))
    S = [g for g, m in enumerate(mask) if m]
    if len(S) < min_size:
        S = [draw(st.integers(0, G.order - 1))]
    return S


@st.composite
def group_and_subset(draw, pool=groups_st):
    G = draw(pool)
    return G, draw(subsets(G))


@st.composite
def probability_weights(draw, n, support=None):
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n)))
    if support is not None:
        mask = np.zeros(n, dtype=bool)
        mask[list(support)] = True
        w = w * mask
    return w / w.sum()


@st.composite
def complex_vectors(draw, n, scale=1.0):
    re = draw(st.lists(st.floats(-scale, scale), min_size=n, max_size=n))
    im = draw(st.lists(st.floats(-scale, scale), min_size=n, max_size=n))
    return np.array(re) + 1j * np.array(im)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
