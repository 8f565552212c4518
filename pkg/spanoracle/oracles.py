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

from collections import namedtuple
from fractions import Fraction
from heapq import heapify, heappush, heappop
import math

import numpy as np

from . import SpanOracleException, threshold, rng, format_distance
from .graph import perturb, sssp, apsp, check_vertex, map_sources
from .nets import EpsNet, UncertifiedNetException, build_net

import logging

class OracleException(SpanOracleException):
    pass

DEFAULT_TZ_RESAMPLES = 64

class QueryAnswer(namedtuple("QueryAnswer", "kind value")):
    """
    Answer of the combined oracle: `bottom` for pairs closer than eps * n,
    the exact distance otherwise.
    """
    __slots__ = ()
    BOTTOM = "bottom"
    EXACT = "exact"

    @classmethod
    def bottom(cls):
        return cls(cls.BOTTOM, None)

    @classmethod
    def exact(cls, value):
        return cls(cls.EXACT, float(value))

    @property
    def is_bottom(self):
        return self.kind == self.BOTTOM

    def __str__(self):
        if self.is_bottom:
            return self.BOTTOM
        return format_distance(self.value)

def exact_table(rows, n):
    """
    Object array of exact distances, one row per entry of `rows`.
    """
    table = np.empty((len(rows), n), dtype=object)
    for i, row in enumerate(rows):
        table[i, :] = list(row)
    return table

class SimpleOracle(object):
    def __init__(self, eps, landmarks, table):
        """
        Exact distances from every landmark to every vertex.
        :param eps: the eps the landmark net was certified for.
        :param landmarks: sorted landmark vertex ids.
        :param table: |landmarks| x n object array of int, Fraction or
            math.inf; row i is d(landmarks[i], .)
        """
        self.eps = eps
        self.landmarks = tuple(landmarks)
        self.table = np.array(table, dtype=object)
        self.table.setflags(write=False)

    @property
    def n(self):
        return self.table.shape[1]

    @property
    def size(self):
        """
        Stored distance entries.
        """
        return self.table.size

    def query(self, v1, v2):
        return query_simple(self, v1, v2)

def build_simple(graph, net, seed=0, threads=1):
    """
    One exact single-source search per net vertex.
    :param graph: Graph object, weighted or not.
    :param net: certified EpsNet for the graph.
    :param threads: worker cap for the searches.
    """
    if not net.certified:
        raise UncertifiedNetException("Landmark oracle needs a certified " \
            "net")
    for u in net.vertices:
        check_vertex(graph.n, u)
    pg = perturb(graph, seed)
    rows = map_sources(
        lambda u: [length.base for length in sssp(pg, u).dist],
        net.vertices, threads
    )
    table = exact_table(rows, graph.n)
    logging.info("Landmark oracle: {0} landmarks x {1} vertices".format(
        len(net.vertices), graph.n
    ))
    return SimpleOracle(float(net.eps), net.vertices, table)

def query_simple(o, v1, v2):
    """
    min over landmarks u of d(v1, u) + d(u, v2), summed exactly. Never
    below the true distance; equal to it when the pair qualifies for the
    net.
    """
    check_vertex(o.n, v1)
    check_vertex(o.n, v2)
    if not o.landmarks:
        return math.inf
    return min(a + b for a, b in zip(o.table[:, v1], o.table[:, v2]))

class TZOracle(object):
    def __init__(self, n, k, levels, pivots, bunches, seed=0):
        """
        Thorup-Zwick approximate distance oracle.
        :param n: vertex count.
        :param k: level parameter, stretch is 2k - 1.
        :param levels: per-vertex top level, v is in A_0..A_levels[v].
        :param pivots: per level i, per vertex (p_i(v), d(v, p_i(v))),
            (None, inf) when no vertex of A_i is reachable.
        :param bunches: per vertex a dictionary w -> d(v, w). Distances
            here and in the pivots are exact ints or Fractions.
        :param seed: seed the levels were sampled with.
        """
        self.n = n
        self.k = k
        self.levels = tuple(levels)
        self.pivots = tuple(tuple(level) for level in pivots)
        self.bunches = tuple(bunches)
        self.seed = seed

    def sample(self, i):
        """
        The vertices of A_i.
        """
        return [v for v in range(self.n) if self.levels[v] >= i]

    @property
    def bunch_total(self):
        return sum(len(bunch) for bunch in self.bunches)

    @property
    def size(self):
        return self.bunch_total + self.k * self.n

    def query(self, v1, v2):
        return query_tz(self, v1, v2)

def _sample_levels(n, k, seed, max_resamples):
    levels = [0] * n
    current = list(range(n))
    probability = n ** (-1.0 / k) if n else 1.0
    for i in range(1, k):
        chosen = []
        for attempt in range(max_resamples):
            keep = rng(seed, 4, i, attempt).random(len(current)) < probability
            chosen = [v for v, kept in zip(current, keep) if kept]
            if chosen:
                break
            logging.warning("Level {0} came out empty, resampling".format(i))
        if not chosen and current:
            chosen = [current[rng(seed, 5, i).integers(len(current))]]
            logging.warning("Level {0} still empty after {1} attempts, " \
                "keeping vertex {2}".format(i, max_resamples, chosen[0]))
        for v in chosen:
            levels[v] = i
        current = chosen
        logging.debug("Level {0}: {1} vertices".format(i, len(current)))
    return levels

def _nearest(graph, sources):
    """
    Multi-source Dijkstra on exact weights. For each vertex the closest
    source, the smallest id among equally close ones.
    """
    dist = [math.inf] * graph.n
    origin = [None] * graph.n
    heap = []
    for s in sources:
        dist[s] = 0
        origin[s] = s
        heap.append((0, s, s))
    heapify(heap)
    while heap:
        d, o, u = heappop(heap)
        if d != dist[u] or o != origin[u]:
            continue
        for v, w in graph.adjacency[u]:
            candidate = d + w
            if candidate < dist[v] or (candidate == dist[v] and o < origin[v]):
                dist[v] = candidate
                origin[v] = o
                heappush(heap, (candidate, o, v))
    return dist, origin

def _cluster(graph, w, limit):
    """
    Vertices v with d(w, v) < limit[v], with their distance from w. The
    pruned search is complete since clusters are closed under taking
    shortest subpaths towards w.
    """
    dist = {w: 0}
    done = set()
    heap = [(0, w)]
    while heap:
        d, u = heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, weight in graph.adjacency[u]:
            candidate = d + weight
            if candidate < limit[v] and candidate < dist.get(v, math.inf):
                dist[v] = candidate
                heappush(heap, (candidate, v))
    return dist

def build_tz(graph, k, seed=0, max_resamples=DEFAULT_TZ_RESAMPLES):
    """
    Sample V = A_0 > A_1 > ... > A_(k-1) with probability n^(-1/k) per
    level, find pivots with one multi-source search per level, then grow
    the cluster of every w in A_i - A_(i+1) while d(w, v) < d(A_(i+1), v).
    :param graph: Graph object.
    :param k: positive integer.
    :param seed: 64-bit integer.
    """
    if k < 1:
        raise OracleException("k must be a positive integer, got {0}".format(
            k
        ))
    n = graph.n
    levels = _sample_levels(n, k, seed, max_resamples)
    nearest = []
    for i in range(k):
        sources = [v for v in range(n) if levels[v] >= i]
        nearest.append(_nearest(graph, sources))
    # A_k is empty
    nearest.append(([math.inf] * n, [None] * n))
    pivots = []
    for i in range(k):
        dist, origin = nearest[i]
        pivots.append([(origin[v], dist[v]) for v in range(n)])
    bunches = [{} for _ in range(n)]
    for w in range(n):
        i = levels[w]
        for v, d in _cluster(graph, w, nearest[i + 1][0]).items():
            bunches[v][w] = d
    oracle = TZOracle(n, k, levels, pivots, bunches, seed)
    logging.info("Thorup-Zwick oracle with k = {0}: {1} bunch entries".format(
        k, oracle.bunch_total
    ))
    return oracle

def query_tz(o, v1, v2):
    """
    Walk up the levels, swapping endpoints, until the pivot of one end is
    in the bunch of the other. Returns D with d <= D <= (2k - 1) d, and
    math.inf across components.
    """
    check_vertex(o.n, v1)
    check_vertex(o.n, v2)
    if v1 == v2:
        return 0
    u, v = v1, v2
    i = 0
    w, to_w = u, 0
    while w is None or w not in o.bunches[v]:
        i += 1
        if i == o.k:
            return math.inf
        u, v = v, u
        w, to_w = o.pivots[i][u]
    return to_w + o.bunches[v][w]

class CombinedOracle(object):
    def __init__(self, eps, delta, tz, landmark):
        """
        Reports bottom for pairs closer than eps * n and the exact
        distance for the rest.
        :param eps: threshold fraction.
        :param delta: size exponent, k = ceil(1 / delta).
        :param tz: TZOracle with that k.
        :param landmark: SimpleOracle built at eps / (2k - 1).
        """
        self.eps = eps
        self.delta = delta
        self.tz = tz
        self.landmark = landmark

    @property
    def k(self):
        return self.tz.k

    @property
    def n(self):
        return self.tz.n

    @property
    def size(self):
        return self.tz.size + self.landmark.size

    def query(self, v1, v2):
        return query_combined(self, v1, v2)

def levels_for(delta):
    """
    k = ceil(1 / delta), computed exactly.
    """
    return int(math.ceil(1 / Fraction(repr(float(delta)))))

def build_combined(graph, eps, delta, seed=0, method=EpsNet.EMETHOD.GREEDY,
    threads=1, max_resamples=DEFAULT_TZ_RESAMPLES, **sampling):
    """
    Thorup-Zwick oracle with k = ceil(1 / delta) plus a landmark oracle on
    a net certified at eps' = eps / (2k - 1).
    :param graph: unweighted Graph object.
    :param eps: real in (0, 1].
    :param delta: real in (0, 1].
    :param method: how the landmark net is built.
    :param sampling: passed on to the sampled net builder.
    """
    if graph.weighted:
        raise OracleException("The combined oracle needs an unweighted graph")
    if not 0 < eps <= 1:
        raise OracleException("eps must be in (0, 1], got {0}".format(eps))
    if not 0 < delta <= 1:
        raise OracleException("delta must be in (0, 1], got {0}".format(delta))
    k = levels_for(delta)
    tz = build_tz(graph, k, seed, max_resamples)
    net_eps = Fraction(repr(float(eps))) / (2 * k - 1)
    dm = apsp(perturb(graph, seed), threads)
    net = build_net(dm, net_eps, method, seed, **sampling)
    simple = build_simple(graph, net, seed, threads)
    landmark = SimpleOracle(float(eps) / (2 * k - 1), simple.landmarks,
        simple.table)
    logging.info("Combined oracle: k = {0}, eps' = {1}, {2} landmarks".format(
        k, landmark.eps, len(landmark.landmarks)
    ))
    return CombinedOracle(float(eps), float(delta), tz, landmark)

def query_combined(o, v1, v2):
    """
    bottom when the Thorup-Zwick estimate is already below eps * n,
    otherwise the pair is far enough for the landmarks to be exact.
    """
    bound = threshold(o.eps, o.n)
    if query_tz(o.tz, v1, v2) < bound:
        return QueryAnswer.bottom()
    tau = query_simple(o.landmark, v1, v2)
    if tau >= bound:
        return QueryAnswer.exact(tau)
    return QueryAnswer.bottom()
