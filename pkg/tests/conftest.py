import functools

import pytest

from qgraph import eigenvalues
from qgraph.library import (
    figure_eight,
    interval,
    lasso,
    loop_with_edge,
    star3,
)


@functools.lru_cache(maxsize=None)
def _cached_pairs(g, count):
    # graphs are immutable and hashable, so spectra can be shared between
    # tests that ask for the same graph
    return tuple(eigenvalues(g, count=count))


@pytest.fixture(scope="session")
def spectrum():
    def get(g, count):
        return list(_cached_pairs(g, count))

    return get


@pytest.fixture(scope="session")
def lasso_g():
    return lasso()


@pytest.fixture(scope="session")
def fig8_g():
    return figure_eight()


@pytest.fixture(scope="session")
def loop_edge_g():
    return loop_with_edge()


@pytest.fixture(scope="session")
def star_short_g():
    return star3((0.9, 1.0, 1.0))


@pytest.fixture(scope="session")
def star_long_g():
    return star3((1.1, 1.0, 1.0))


@pytest.fixture(scope="session")
def interval_g():
    return interval()


@pytest.fixture(scope="session")
def bundled(lasso_g, fig8_g, loop_edge_g, star_short_g, star_long_g, interval_g):
    return {
        "interval": interval_g,
        "star3_short": star_short_g,
        "star3_long": star_long_g,
        "lasso": lasso_g,
        "figure8": fig8_g,
        "loop_edge": loop_edge_g,
    }
