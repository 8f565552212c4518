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

from hashlib import sha1
from struct import pack, unpack
from collections import deque, namedtuple
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from heapq import heappush, heappop
import math

import numpy as np

from . import SpanOracleException, threshold, MASK64

import logging

class GraphException(SpanOracleException):
    pass

class GraphFormatException(GraphException):
    def __init__(self, line, message):
        """
        A graph file that could not be read.
        :param line: 1-based line number the problem was found on.
        :param message: what was wrong with it.
        """
        super(GraphFormatException, self).__init__(
            "line {line}: {message}".format(line=line, message=message)
        )
        self.line = line

class ReseedRequired(GraphException):
    pass

def exact_weight(w):
    """
    Normalise an edge weight so that sums of weights are exact. Integral
    values become `int`, anything else a `Fraction`.
    :param w: int, float, Fraction or decimal string.
    """
    if isinstance(w, str):
        try:
            w = int(w)
        except ValueError:
            try:
                w = Fraction(w)
            except (ValueError, ZeroDivisionError):
                raise GraphException("Weight is not a number: {0}".format(w))
    if isinstance(w, bool):
        raise GraphException("Weight is not a number: {0}".format(w))
    if isinstance(w, float):
        if not math.isfinite(w):
            raise GraphException("Weight must be finite: {0}".format(w))
        w = Fraction(repr(w))
    if isinstance(w, (int, np.integer)):
        w = int(w)
    elif isinstance(w, Fraction):
        if w.denominator == 1:
            w = w.numerator
    else:
        raise GraphException("Weight is not a number: {0!r}".format(w))
    if w <= 0:
        raise GraphException("Weight must be positive: {0}".format(w))
    return w

def map_sources(func, sources, threads=1):
    """
    Run `func` once per source and return the results in source order.
    The searches are pure Python and hold the GIL, so more threads cap
    the workers without speeding them up; results never depend on the
    thread count.
    :param threads: worker cap, 1 runs everything in this thread.
    """
    sources = list(sources)
    if threads is None or threads <= 1 or len(sources) < 2:
        return [func(source) for source in sources]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, sources))

class Graph(object):
    class EFLAG:
        """
        Header flag of the graph text format.
        """
        UNWEIGHTED = "unweighted"
        WEIGHTED = "weighted"

    COMMENT = "#"

    @classmethod
    def from_path(cls, path):
        """
        Load a graph from a file in the graph text format.
        :param path: A path as string to the graph file.
        """
        with open(path) as f:
            return cls.from_file(f)

    @classmethod
    def from_file(cls, f):
        """
        Load a graph from a file object in the graph text format.
        :param f: file object to read lines from.
        """
        return cls.from_string(f.read())

    @classmethod
    def from_string(cls, s):
        """
        Parse the graph text format: a header line `n m flag` then m edge
        lines `u v` (unweighted) or `u v w` (weighted). Anything after a
        `#` is a comment.
        :param s: the whole file as a string.
        """
        header = None
        edges = []
        seen = set()
        line_number = 0
        for line_number, raw in enumerate(s.splitlines(), 1):
            tokens = raw.split(cls.COMMENT, 1)[0].split()
            if not tokens:
                continue
            if header is None:
                header = cls._parse_header(line_number, tokens)
                continue
            n, m, weighted = header
            if len(edges) == m:
                raise GraphFormatException(line_number,
                    "more than the {0} edges declared".format(m))
            expected = 3 if weighted else 2
            if len(tokens) != expected:
                raise GraphFormatException(line_number,
                    "expected {0} fields, got {1}".format(
                        expected, len(tokens)
                    ))
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise GraphFormatException(line_number,
                    "vertex ids must be integers")
            w = tokens[2] if weighted else 1
            try:
                edges.append(cls._check_edge(n, seen, u, v, w))
            except GraphException as e:
                raise GraphFormatException(line_number, str(e))
        if header is None:
            raise GraphFormatException(line_number + 1, "missing header")
        n, m, weighted = header
        if len(edges) != m:
            raise GraphFormatException(line_number + 1,
                "expected {0} edges, found {1}".format(m, len(edges)))
        return cls(n, edges, weighted=weighted)

    @classmethod
    def _parse_header(cls, line_number, tokens):
        if len(tokens) != 3:
            raise GraphFormatException(line_number,
                "header must be `n m flag`")
        try:
            n, m = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatException(line_number,
                "n and m must be integers")
        if n < 0 or m < 0:
            raise GraphFormatException(line_number,
                "n and m must not be negative")
        flag = tokens[2]
        if flag not in (cls.EFLAG.UNWEIGHTED, cls.EFLAG.WEIGHTED):
            raise GraphFormatException(line_number,
                "unknown flag '{0}'".format(flag))
        return n, m, flag == cls.EFLAG.WEIGHTED

    @staticmethod
    def _check_edge(n, seen, u, v, w):
        if not (0 <= u < n and 0 <= v < n):
            raise GraphException("Edge ({0}, {1}) out of range for n = " \
                "{2}".format(u, v, n))
        if u == v:
            raise GraphException("Self-loop at vertex {0}".format(u))
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphException("Parallel edge {0}-{1}".format(*key))
        seen.add(key)
        return key + (exact_weight(w),)

    def __init__(self, n, edges, weighted=None):
        """
        An undirected weighted simple graph on vertices 0..n-1.
        :param n: vertex count.
        :param edges: iterable of (u, v) or (u, v, w) tuples.
        :param weighted: whether weights are meaningful. Unweighted
            graphs have every weight equal to 1. When None it is worked
            out from the weights.
        """
        if n < 0:
            raise GraphException("Vertex count must not be negative")
        self.n = int(n)
        seen = set()
        checked = []
        for edge in edges:
            u, v = int(edge[0]), int(edge[1])
            w = edge[2] if len(edge) > 2 else 1
            checked.append(self._check_edge(self.n, seen, u, v, w))
        if weighted is None:
            weighted = any(w != 1 for _, _, w in checked)
        elif not weighted and any(w != 1 for _, _, w in checked):
            raise GraphException("Unweighted graphs must have unit weights")
        self.edges = tuple(checked)
        self.weighted = bool(weighted)
        self._adjacency = None

    @property
    def m(self):
        return len(self.edges)

    @property
    def adjacency(self):
        """
        Per-vertex list of (neighbour, weight), built on first use.
        """
        if self._adjacency is None:
            adjacency = [[] for _ in range(self.n)]
            for u, v, w in self.edges:
                adjacency[u].append((v, w))
                adjacency[v].append((u, w))
            self._adjacency = adjacency
        return self._adjacency

    def to_string(self):
        """
        The graph in the graph text format.
        """
        flag = self.EFLAG.WEIGHTED if self.weighted else \
            self.EFLAG.UNWEIGHTED
        lines = ["{0} {1} {2}".format(self.n, self.m, flag)]
        for u, v, w in self.edges:
            if self.weighted:
                lines.append("{0} {1} {2}".format(u, v, w))
            else:
                lines.append("{0} {1}".format(u, v))
        return "\n".join(lines) + "\n"

    def save(self, f):
        f.write(self.to_string())

class PerturbedLength(namedtuple("PerturbedLength", "base tie")):
    """
    A path length with a tie-breaker. Ordered lexicographically (it is a
    tuple) and added componentwise.
    """
    __slots__ = ()

    def __add__(self, other):
        return PerturbedLength(self.base + other.base, self.tie + other.tie)

    @property
    def reachable(self):
        return self.base != math.inf

ZERO = PerturbedLength(0, 0)
UNREACHABLE = PerturbedLength(math.inf, 0)

def edge_tie(seed, u, v):
    """
    64-bit tie-breaker of the edge {u, v}. Depends only on the seed and
    the endpoints so edge order in the file does not matter.
    """
    key = pack(">QQQ", seed & MASK64, min(u, v), max(u, v))
    return unpack(">Q", sha1(key).digest()[:8])[0]

class PerturbedGraph(object):
    def __init__(self, graph, seed, ties):
        """
        A graph whose edges carry a tie value next to their weight.
        :param graph: Graph object.
        :param seed: the seed the ties were drawn with.
        :param ties: dictionary from (min id, max id) to tie value.
        """
        self.graph = graph
        self.seed = seed
        self.ties = ties
        self._adjacency = None

    @property
    def n(self):
        return self.graph.n

    @property
    def adjacency(self):
        """
        Per-vertex list of (neighbour, PerturbedLength).
        """
        if self._adjacency is None:
            adjacency = [[] for _ in range(self.n)]
            for u, v, w in self.graph.edges:
                length = PerturbedLength(w, self.ties[(u, v)])
                adjacency[u].append((v, length))
                adjacency[v].append((u, length))
            self._adjacency = adjacency
        return self._adjacency

def perturb(graph, seed=0):
    """
    Attach a pseudorandom tie to every edge so that shortest paths become
    unique. The same graph and seed always give the same ties.
    :param graph: Graph object.
    :param seed: 64-bit integer.
    """
    ties = dict(
        ((u, v), edge_tie(seed, u, v)) for u, v, _ in graph.edges
    )
    return PerturbedGraph(graph, seed, ties)

def check_vertex(n, v):
    if not 0 <= v < n:
        raise GraphException("Vertex {0} out of range for n = {1}".format(
            v, n
        ))

class ShortestPathForest(object):
    def __init__(self, source, dist, parent):
        """
        Result of one perturbed single-source search.
        :param source: source vertex.
        :param dist: per-vertex PerturbedLength, UNREACHABLE if there is
            no path.
        :param parent: per-vertex predecessor or None.
        """
        self.source = source
        self.dist = dist
        self.parent = parent

    def path_to(self, target):
        """
        Vertices of the canonical path from the source to `target` in
        order. Empty when `target` is unreachable.
        """
        if not self.dist[target].reachable:
            return []
        path = [target]
        while path[-1] != self.source:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path

    def ambiguous_vertex(self, pg):
        """
        First vertex with more than one optimal parent, or None when the
        forest is the only shortest-path forest of the source.
        :param pg: the PerturbedGraph this forest was computed on.
        """
        for v in range(len(self.dist)):
            if v == self.source or not self.dist[v].reachable:
                continue
            optimal = 0
            for u, length in pg.adjacency[v]:
                if self.dist[u].reachable and \
                    self.dist[u] + length == self.dist[v]:
                    optimal += 1
            if optimal != 1:
                return v
        return None

def sssp(pg, source):
    """
    Dijkstra over PerturbedLength.
    :param pg: PerturbedGraph object.
    :param source: source vertex id.
    Returns ShortestPathForest.
    """
    check_vertex(pg.n, source)
    dist = [UNREACHABLE] * pg.n
    parent = [None] * pg.n
    done = [False] * pg.n
    dist[source] = ZERO
    heap = [(ZERO, source)]
    while heap:
        length, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, edge in pg.adjacency[u]:
            candidate = length + edge
            if candidate < dist[v]:
                dist[v] = candidate
                parent[v] = u
                heappush(heap, (candidate, v))
    return ShortestPathForest(source, dist, parent)

def bfs_hops(graph, source):
    """
    Unweighted distances from `source`; math.inf for unreachable vertices.
    :param graph: Graph (or PerturbedGraph, only the edges are used).
    :param source: source vertex id.
    """
    graph = getattr(graph, "graph", graph)
    check_vertex(graph.n, source)
    hops = [math.inf] * graph.n
    hops[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v, _ in graph.adjacency[u]:
            if hops[v] == math.inf:
                hops[v] = hops[u] + 1
                queue.append(v)
    return hops

class DistanceMatrix(object):
    def __init__(self, pg, forests, hops):
        """
        All-pairs distances of a perturbed graph.
        :param pg: PerturbedGraph object.
        :param forests: one ShortestPathForest per source, in order.
        :param hops: one list of hop distances per source, in order.
        """
        self.pg = pg
        self.n = pg.n
        self.forests = tuple(forests)
        self.d = np.empty((self.n, self.n))
        for source, forest in enumerate(self.forests):
            self.d[source, :] = [float(length.base) for length in forest.dist]
        self.d_unw = np.array(hops, dtype=float).reshape(self.n, self.n)

    @property
    def graph(self):
        return self.pg.graph

    def plen(self, v1, v2):
        """
        Perturbed length of the canonical path between v1 and v2.
        """
        return self.forests[v1].dist[v2]

    def exact(self, v1, v2):
        """
        d(v1, v2) as an int or Fraction, math.inf when unreachable. `d`
        holds the same values rounded to floats.
        """
        return self.plen(v1, v2).base

    def canonical_path(self, v1, v2):
        """
        Vertices of the unique perturbed shortest path from v1 to v2.
        """
        return self.forests[v1].path_to(v2)

    def canonical_path_set(self, v1, v2):
        return frozenset(self.canonical_path(v1, v2))

    def hop_count_of_canonical(self, v1, v2):
        return max(len(self.canonical_path(v1, v2)) - 1, 0)

    def qualifying_pairs(self, eps):
        """
        Pairs v1 < v2 with d_unw(v1, v2) >= eps * n, in lexicographic
        order.
        """
        if self.n == 0:
            return []
        need = math.ceil(threshold(eps, self.n))
        mask = np.triu(self.d_unw >= need, k=1) & np.isfinite(self.d_unw)
        return [(int(v1), int(v2)) for v1, v2 in np.argwhere(mask)]

def apsp(pg, threads=1):
    """
    n perturbed searches plus n breadth-first searches. Refuses to return
    if the perturbation left any shortest path ambiguous.
    :param pg: PerturbedGraph object.
    :param threads: worker cap for the per-source searches.
    Returns DistanceMatrix.
    """
    forests = map_sources(lambda s: sssp(pg, s), range(pg.n), threads)
    for forest in forests:
        v = forest.ambiguous_vertex(pg)
        if v is not None:
            raise ReseedRequired("Two optimal parents for vertex {0} from " \
                "source {1} with seed {2}; reseed required".format(
                    v, forest.source, pg.seed
                ))
    hops = map_sources(lambda s: bfs_hops(pg.graph, s), range(pg.n), threads)
    logging.info("All-pairs distances computed for {0} vertices".format(
        pg.n
    ))
    return DistanceMatrix(pg, forests, hops)

def on_canonical_path(dm, v1, v2, u):
    """
    True when u lies on the canonical path between v1 and v2, decided by
    exact equality of perturbed lengths.
    """
    target = dm.plen(v1, v2)
    if not target.reachable:
        return False
    first, second = dm.plen(v1, u), dm.plen(u, v2)
    if not (first.reachable and second.reachable):
        return False
    return first + second == target
