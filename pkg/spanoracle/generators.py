#    This file is part of spanoracle.
#
#    spanoracle is free software: you can redistribute it and/or modify
#    it under the terms of the GNU General Public License as published by
#    the Free Software Foundation, either version 3 of the License, or
#    (at your option) any later version.
#
#    spanoracle is distributed in the hope that it will be useful,
#    but WITHOUT ANY WARRANTY; without even the implied warranty of
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#    GNU General Public License for more details.
#
#    You should have received a copy of the GNU General Public License
#    along with spanoracle.  If not, see <http://www.gnu.org/licenses/>.

"""Graph families for tests and benchmarks. All of them are seeded."""

import math

from scipy.spatial.distance import pdist

from . import pairs, rng
from .graph import Graph, GraphException

import logging

class GeneratorException(GraphException):
    pass

def _need(condition, message):
    if not condition:
        raise GeneratorException(message)

def path_graph(n, **_):
    _need(n >= 1, "path needs n >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)], weighted=False)

def cycle_graph(n, **_):
    _need(n >= 3, "cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], weighted=False)

def grid_graph(rows, cols, **_):
    _need(rows >= 1 and cols >= 1, "grid needs rows, cols >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges, weighted=False)

def gnp_graph(n, p, seed=0, weighted=False, max_weight=10, **_):
    """
    Erdos-Renyi G(n, p). Weighted graphs get integer weights drawn
    uniformly from 1..max_weight.
    """
    _need(n >= 1, "gnp needs n >= 1")
    _need(0 <= p <= 1, "gnp needs 0 <= p <= 1")
    stream = rng(seed, 1)
    keep = stream.random(n * (n - 1) // 2) < p
    edges = [pair for pair, kept in zip(pairs(n), keep) if kept]
    if weighted:
        weights = stream.integers(1, max_weight + 1, size=len(edges))
        edges = [(u, v, int(w)) for (u, v), w in zip(edges, weights)]
    return Graph(n, edges, weighted=weighted)

def geometric_graph(n, radius, seed=0, weighted=True, scale=100, **_):
    """
    Random geometric graph on the unit square. Weighted graphs use the
    Euclidean length scaled by `scale` and rounded up to an integer.
    """
    _need(n >= 1, "geometric needs n >= 1")
    _need(radius > 0, "geometric needs radius > 0")
    points = rng(seed, 2).random((n, 2))
    lengths = pdist(points) if n > 1 else []
    edges = []
    for (u, v), length in zip(pairs(n), lengths):
        if length <= radius:
            if weighted:
                edges.append((u, v, max(1, int(math.ceil(length * scale)))))
            else:
                edges.append((u, v))
    return Graph(n, edges, weighted=weighted)

FAMILIES = {
    "path": path_graph,
    "cycle": cycle_graph,
    "grid": grid_graph,
    "gnp": gnp_graph,
    "geometric": geometric_graph,
}

def generate(family, **params):
    """
    Build a graph of the named family.
    :param family: one of FAMILIES.
    :param params: family parameters (n, p, rows, cols, radius, seed,
        weighted).
    """
    if family not in FAMILIES:
        raise GeneratorException("Unknown family '{0}', expected one of " \
            "{1}".format(family, ", ".join(sorted(FAMILIES))))
    try:
        graph = FAMILIES[family](**params)
    except TypeError as e:
        raise GeneratorException("Missing parameter for {0}: {1}".format(
            family, e
        ))
    logging.info("Generated {0} graph with {1} vertices and {2} " \
        "edges".format(family, graph.n, graph.m))
    return graph
