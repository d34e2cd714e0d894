import numpy as np
import pytest

from wrdpm import WeightedGraph


def disjoint_cliques(sizes, weight=1.0):
    """Union of complete graphs with constant edge weight."""
    n = sum(sizes)
    w = np.zeros((n, n))
    start = 0
    for z in sizes:
        w[start:start + z, start:start + z] = weight
        start += z
    np.fill_diagonal(w, 0.0)
    return WeightedGraph(w)


def bridge_graph(clique_size=5):
    """Two cliques joined by one edge between node 0 and node clique_size."""
    g = disjoint_cliques([clique_size, clique_size])
    w = g.weights.copy()
    w[0, clique_size] = w[clique_size, 0] = 1.0
    return WeightedGraph(w)


def random_integer_graph(rng, n, max_weight=5, density=0.5):
    w = rng.integers(0, max_weight + 1, (n, n)).astype(float)
    w *= rng.random((n, n)) < density
    w = np.triu(w, 1)
    return WeightedGraph(w + w.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
