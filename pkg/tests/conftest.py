import numpy as np
import pytest

from dynaprop import ADD_EDGE, DELETE_EDGE, GraphEvent, WeightedDynamicGraph


def random_graph(rng, n, avg_degree=4.0, w_low=0.05, w_high=2.0):
    """Random weighted undirected graph; may contain isolated nodes."""
    g = WeightedDynamicGraph(n)
    target = int(n * avg_degree / 2)
    for _ in range(target):
        u, v = rng.integers(0, n, 2)
        if u != v:
            g.add_edge(int(u), int(v), float(rng.uniform(w_low, w_high)))
    return g


def random_event(rng, graph, t, insert_prob=0.7):
    """One feasible event against the graph's current state."""
    if rng.random() < insert_prob or graph.m == 0:
        while True:
            u, v = rng.integers(0, graph.n, 2)
            if u != v:
                return GraphEvent(time=t, kind=ADD_EDGE, u=int(u), v=int(v),
                                  weight=float(rng.uniform(0.05, 2.0)))
    edges = list(graph.edges())
    u, v, w = edges[rng.integers(0, len(edges))]
    # full removal most of the time so isolation happens regularly
    amount = w if rng.random() < 0.7 else w * 0.5
    return GraphEvent(time=t, kind=DELETE_EDGE, u=u, v=v, weight=float(amount))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
