import numpy as np
import pytest
from hypothesis import settings, strategies as st

from elastic_l2 import atom

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

_ACCEPTANCE_KEY = pytest.StashKey[dict]()


def random_atoms(rng, dim, count=3, max_degree=2):
    out = []
    for _ in range(count):
        while True:
            g = rng.integers(0, max_degree + 1, size=dim)
            if g.sum() <= max_degree:
                break
        out.append(atom(float(rng.normal()), tuple(int(x) for x in g), float(rng.uniform(0.6, 1.8))))
    return tuple(out)


@st.composite
def atom_strategy(draw, dim):
    gamma = draw(
        st.lists(st.integers(0, 2), min_size=dim, max_size=dim).filter(lambda g: sum(g) <= 2)
    )
    coeff = draw(st.floats(-3, 3, allow_nan=False).filter(lambda c: abs(c) > 1e-3))
    width = draw(st.floats(0.5, 2.0))
    return atom(coeff, gamma, width)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = {}


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[_ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE_KEY, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(log):
        terminalreporter.write_line(log[key])
