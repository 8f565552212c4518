"""
Shared fixtures: small graphs and an all-pairs oracle that does not use
any of the package's own shortest path code.
"""

from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import floyd_warshall, shortest_path

from spanoracle.graph import Graph, perturb, apsp
from spanoracle.generators import (path_graph, cycle_graph, grid_graph,
    gnp_graph, geometric_graph)

def brute_force(graph):
    """
    (d, d_unw) as dense arrays: Floyd-Warshall on the weights and
    unweighted search on the same edges. np.inf for unreachable pairs.
    """
    n = graph.n
    weights = np.zeros((n, n))
    for u, v, w in graph.edges:
        weights[u, v] = weights[v, u] = float(w)
    d = floyd_warshall(csr_matrix(weights), directed=False)
    d_unw = shortest_path(csr_matrix(weights), directed=False,
        unweighted=True)
    return d, d_unw

def distances(graph, seed=0):
    return apsp(perturb(graph, seed))

def triangle():
    return Graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 2)], weighted=True)

def complete_graph(n):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)],
        weighted=False)

def small_graphs(count=50, seed=0):
    """
    `count` random graphs with at most 12 vertices over every family.
    """
    stream = np.random.default_rng(seed)
    found = []
    for i in range(count):
        n = int(stream.integers(3, 13))
        kind = i % 4
        if kind == 0:
            found.append(gnp_graph(n, 0.4, seed=i))
        elif kind == 1:
            found.append(gnp_graph(n, 0.5, seed=i, weighted=True))
        elif kind == 2:
            found.append(geometric_graph(n, 0.6, seed=i))
        else:
            found.append(grid_graph(2, max(2, n // 2)))
    return found

def named_graphs(n):
    """
    One graph per family on roughly n vertices.
    """
    side = int(round(n ** 0.5))
    return {
        "path": path_graph(n),
        "cycle": cycle_graph(n),
        "grid": grid_graph(side, side),
        "gnp": gnp_graph(n, 4.0 / n, seed=1),
        "geometric": geometric_graph(n, 0.25, seed=1),
    }

DECIMAL_WEIGHTS = ("0.1", "0.2", "0.1", "0.2", "0.7", "0.1", "0.2", "0.3",
    "0.1")

def decimal_path():
    """
    Path on 10 vertices whose weights have no exact float sum, with its
    exact distance function.
    """
    weights = [Fraction(w) for w in DECIMAL_WEIGHTS]
    graph = Graph(len(weights) + 1,
        [(i, i + 1, w) for i, w in enumerate(DECIMAL_WEIGHTS)], weighted=True)
    def exact(v1, v2):
        low, high = min(v1, v2), max(v1, v2)
        return sum(weights[low:high], Fraction(0))
    return graph, exact
