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

import math

import numpy as np
from scipy.spatial.distance import pdist, squareform

from . import SpanOracleException, threshold, rng
from .nets import UncertifiedNetException

import logging

class EmbeddingException(SpanOracleException):
    pass

class InvalidMetricException(EmbeddingException):
    pass

DEFAULT_C3 = 4
DEFAULT_M = 64
# Documented bound on measured Bourgain expansion / log2 |U| for uniform
# metrics with the default C3.
BOURGAIN_LOG_CONSTANT = 8.0
# Relative slack for float summation when checking non-contraction.
TOLERANCE = 1e-9

class EMODE:
    EXACT = "exact"
    COMPRESSED = "compressed"
    ALL = ("exact", "compressed")

def l1_distances(coords):
    """
    Pairwise l1 distances between the rows of `coords` as a square matrix.
    """
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    if n < 2 or coords.shape[1] == 0:
        return np.zeros((n, n))
    return squareform(pdist(coords, "cityblock"))

class Embedding(object):
    @classmethod
    def from_path(cls, path):
        with open(path) as f:
            return cls.from_file(f)

    @classmethod
    def from_file(cls, f):
        return cls.from_string(f.read())

    @classmethod
    def from_string(cls, s):
        """
        Parse the export format: `n dim` then one row of dim floats per
        point.
        """
        lines = [line.split() for line in s.splitlines() if line.strip()]
        if not lines or len(lines[0]) != 2:
            raise EmbeddingException("Embedding text needs an `n dim` header")
        n, dim = int(lines[0][0]), int(lines[0][1])
        rows = lines[1:]
        if len(rows) != n or any(len(row) != dim for row in rows):
            raise EmbeddingException("Expected {0} rows of {1} values".format(
                n, dim
            ))
        coords = np.array([[float(x) for x in row] for row in rows],
            dtype=float).reshape(n, dim)
        return cls(coords)

    def __init__(self, coords):
        """
        Points in (R^dim, l1).
        :param coords: n_points x dim array.
        """
        coords = np.array(coords, dtype=float)
        if coords.ndim != 2:
            raise EmbeddingException("Coordinates must be a 2-D array")
        if not np.all(np.isfinite(coords)):
            raise EmbeddingException("Coordinates must be finite")
        coords.setflags(write=False)
        self.coords = coords
        self._pairwise = None

    @property
    def n_points(self):
        return self.coords.shape[0]

    @property
    def dim(self):
        return self.coords.shape[1]

    def distance(self, i, j):
        return float(np.abs(self.coords[i] - self.coords[j]).sum())

    def pairwise(self):
        if self._pairwise is None:
            self._pairwise = l1_distances(self.coords)
        return self._pairwise

    def to_string(self):
        lines = ["{0} {1}".format(self.n_points, self.dim)]
        for row in self.coords:
            lines.append(" ".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"

    def save(self, f):
        f.write(self.to_string())

class CompositeEmbedding(Embedding):
    def __init__(self, coords, base, star, assignment, metric):
        """
        f(v) = g(p(v)) followed by h(v).
        :param base: Embedding g of the net.
        :param star: Embedding h of the pseudo-distance d'.
        :param assignment: NetAssignment p, r.
        :param metric: the metric of the net g embeds.
        """
        super(CompositeEmbedding, self).__init__(coords)
        self.base = base
        self.star = star
        self.assignment = assignment
        self.metric = metric

class NetAssignment(object):
    def __init__(self, landmarks, p, r):
        """
        Nearest net vertex of every vertex.
        :param landmarks: sorted net vertex ids U.
        :param p: per-vertex index into landmarks.
        :param r: per-vertex distance to that landmark.
        """
        self.landmarks = tuple(landmarks)
        self.p = np.asarray(p, dtype=int)
        self.r = np.asarray(r, dtype=float)

    @property
    def n(self):
        return len(self.r)

    def nearest(self, v):
        return self.landmarks[self.p[v]]

    def pseudo_distance(self, v1, v2):
        """
        d'(v1, v2) = r(v1) + r(v2), and 0 when v1 == v2.
        """
        if v1 == v2:
            return 0.0
        return float(self.r[v1] + self.r[v2])

    def pseudo_matrix(self):
        matrix = self.r[:, None] + self.r[None, :]
        np.fill_diagonal(matrix, 0.0)
        return matrix

class DistortionReport(object):
    def __init__(self, eps, dim, min_ratio_all, max_ratio_all,
        max_ratio_large, worst_large_pair, pairs, qualifying_pairs):
        """
        Ratios ||f(v1) - f(v2)||_1 / d(v1, v2) over pairs with d > 0.
        max_ratio_large is over pairs with d_unw >= eps * n and is 0 with
        worst_large_pair None when there are none.
        """
        self.eps = eps
        self.dim = dim
        self.min_ratio_all = min_ratio_all
        self.max_ratio_all = max_ratio_all
        self.max_ratio_large = max_ratio_large
        self.worst_large_pair = worst_large_pair
        self.pairs = pairs
        self.qualifying_pairs = qualifying_pairs

    @property
    def has_qualifying_pairs(self):
        return self.qualifying_pairs > 0

    def to_dict(self):
        return {
            "eps": self.eps,
            "dim": self.dim,
            "min_ratio_all": self.min_ratio_all,
            "max_ratio_all": self.max_ratio_all,
            "max_ratio_large": self.max_ratio_large,
            "worst_large_pair": list(self.worst_large_pair) \
                if self.worst_large_pair else None,
            "has_qualifying_pairs": self.has_qualifying_pairs,
            "pairs": self.pairs,
            "qualifying_pairs": self.qualifying_pairs,
        }

def _ratios(metric, embedded):
    i, j = np.triu_indices(metric.shape[0], 1)
    base = metric[i, j]
    mask = (base > 0) & np.isfinite(base)
    return embedded[i, j][mask] / base[mask]

def ratio_range(metric, emb):
    """
    (min, max) of embedded / metric over pairs with positive distance,
    (1, 1) when there are none.
    """
    ratios = _ratios(np.asarray(metric, dtype=float), emb.pairwise())
    if not ratios.size:
        return 1.0, 1.0
    return float(ratios.min()), float(ratios.max())

def expansion(metric, emb):
    """
    Largest embedded / metric ratio, the measured distortion of a
    non-contracting embedding.
    """
    return ratio_range(metric, emb)[1]

def star_expansion(na, emb):
    """
    Largest ||h(v1) - h(v2)||_1 / d'(v1, v2) over pairs with d' > 0.
    """
    return expansion(na.pseudo_matrix(), emb)

def check_metric(metric):
    """
    Reject anything that is not a finite metric with distinct points.
    Returns the metric as a float array.
    """
    metric = np.array(metric, dtype=float)
    if metric.ndim != 2 or metric.shape[0] != metric.shape[1]:
        raise InvalidMetricException("Metric must be a square matrix")
    size = metric.shape[0]
    if size < 1:
        raise InvalidMetricException("Metric needs at least one point")
    if not np.all(np.isfinite(metric)):
        raise InvalidMetricException("Metric must be finite")
    if np.any(np.diag(metric) != 0):
        raise InvalidMetricException("Metric must have a zero diagonal")
    if not np.array_equal(metric, metric.T):
        raise InvalidMetricException("Metric must be symmetric")
    off = ~np.eye(size, dtype=bool)
    if np.any(metric[off] <= 0):
        raise InvalidMetricException("Distinct points must be at positive " \
            "distance")
    slack = TOLERANCE * metric.max()
    for k in range(size):
        if np.any(metric > metric[:, [k]] + metric[[k], :] + slack):
            raise InvalidMetricException("Triangle inequality fails through " \
                "point {0}".format(k))
    return metric

def bourgain_embed(metric, seed=0, c3=DEFAULT_C3):
    """
    Frechet coordinates u -> min over s in S of metric(u, s) for random S
    of size 2^q, q = 1..ceil(log2 |U|), ceil(c3 * log2(|U| + 1)) times per
    scale, then scaled by the worst contraction so that no pair contracts.
    :param metric: |U| x |U| distance matrix.
    :param seed: master seed, every coordinate has its own stream.
    :param c3: repetitions constant.
    """
    metric = check_metric(metric)
    size = metric.shape[0]
    if size == 1:
        return Embedding(np.zeros((1, 0)))
    scales = int(math.ceil(math.log2(size)))
    repetitions = int(math.ceil(c3 * math.log2(size + 1)))
    columns = []
    for q in range(1, scales + 1):
        chosen_size = min(2 ** q, size)
        for l in range(repetitions):
            chosen = rng(seed, 6, q, l).choice(size, size=chosen_size,
                replace=False)
            columns.append(metric[:, chosen].min(axis=1))
    raw = np.column_stack(columns)
    raw_distances = l1_distances(raw)
    i, j = np.triu_indices(size, 1)
    degenerate = raw_distances[i, j] == 0
    if np.any(degenerate):
        logging.debug("{0} pairs not separated, adding coordinates".format(
            int(degenerate.sum())
        ))
        extra = [metric[:, a] for a in i[degenerate]]
        raw = np.column_stack([raw] + extra)
        raw_distances = l1_distances(raw)
    alpha = float(np.max(metric[i, j] / raw_distances[i, j]))
    logging.debug("Bourgain embedding of {0} points: dim {1}, scale " \
        "{2}".format(size, raw.shape[1], alpha))
    return Embedding(raw * alpha)

def assign_net(dm, vertices):
    """
    Nearest net vertex by d, smallest id on ties.
    :param dm: DistanceMatrix object.
    :param vertices: non-empty net.
    """
    landmarks = sorted(set(vertices))
    if not landmarks:
        raise EmbeddingException("Net assignment needs a non-empty net")
    rows = dm.d[landmarks, :]
    p = np.argmin(rows, axis=0)
    r = rows[p, np.arange(dm.n)]
    return NetAssignment(landmarks, p, r)

def star_embed(na, mode=EMODE.EXACT, seed=0, m=DEFAULT_M):
    """
    Embedding h of d'(v1, v2) = r(v1) + r(v2).
    exact: r(v) on coordinate v, so ||h(v1) - h(v2)||_1 = d' exactly.
    compressed: (2 r(v) / m) times a random sign vector of length m, then
    scaled by the worst measured contraction. Two vertices with the same
    sign vector would land on one point; both then get an exact coordinate
    of their own, so the dimension can exceed m. Collisions are rare once
    2^m is well above n^2, m >= 2 log2(n) + 8 in practice.
    """
    if not np.all(np.isfinite(na.r)):
        raise EmbeddingException("Every vertex needs a reachable net vertex")
    if mode == EMODE.EXACT:
        return Embedding(np.diag(na.r))
    if mode != EMODE.COMPRESSED:
        raise EmbeddingException("Unknown star mode '{0}'".format(mode))
    if m < 1:
        raise EmbeddingException("Compressed mode needs m >= 1")
    signs = np.array([
        rng(seed, 7, v).choice([-1.0, 1.0], size=m) for v in range(na.n)
    ]).reshape(na.n, m)
    coords = (2.0 * na.r / m)[:, None] * signs
    pseudo = na.pseudo_matrix()
    embedded = l1_distances(coords)
    i, j = np.triu_indices(na.n, 1)
    wanted = pseudo[i, j] > 0
    collapsed = wanted & (embedded[i, j] == 0)
    if np.any(collapsed):
        colliding = sorted(set(i[collapsed]) | set(j[collapsed]))
        logging.warning("{0} pairs share a sign vector at m {1}, giving {2} " \
            "vertices exact coordinates".format(int(collapsed.sum()), m,
                len(colliding)))
        extra = np.zeros((na.n, len(colliding)))
        extra[colliding, np.arange(len(colliding))] = na.r[colliding]
        coords = np.column_stack([coords, extra])
        embedded = l1_distances(coords)
    beta = 1.0
    if np.any(wanted):
        beta = float(np.max(pseudo[i, j][wanted] / embedded[i, j][wanted]))
    logging.debug("Compressed star embedding: m {0}, dim {1}, scale " \
        "{2}".format(m, coords.shape[1], beta))
    return Embedding(coords * beta)

def blackbox_embed(dm, net, base=bourgain_embed, mode=EMODE.EXACT, seed=0,
    m=DEFAULT_M):
    """
    f(v) = g(p(v)) followed by h(v): g a base embedding of the net, p(v)
    the nearest net vertex, h the star embedding of d'.
    :param dm: DistanceMatrix of a connected graph.
    :param net: certified EpsNet.
    :param base: callable (metric, seed) -> non-contracting Embedding.
    """
    if not net.certified:
        raise UncertifiedNetException("Black-box embedding needs a " \
            "certified net")
    vertices = list(net.vertices)
    if not vertices:
        # any superset of a certified net is certified
        vertices = [0]
        logging.warning("Empty net, using vertex 0 as the only landmark")
    na = assign_net(dm, vertices)
    if not np.all(np.isfinite(na.r)):
        raise EmbeddingException("Black-box embedding needs a connected graph")
    metric = dm.d[np.ix_(na.landmarks, na.landmarks)]
    g = base(metric, seed)
    if g.n_points != len(na.landmarks):
        raise EmbeddingException("Base embedding has {0} points for {1} " \
            "net vertices".format(g.n_points, len(na.landmarks)))
    low, _ = ratio_range(metric, g)
    if low < 1 - TOLERANCE:
        raise EmbeddingException("Base embedding contracts a pair by " \
            "{0}".format(low))
    h = star_embed(na, mode, seed, m)
    coords = np.hstack([g.coords[na.p], h.coords])
    logging.info("Black-box embedding: dim {0} = {1} + {2}".format(
        coords.shape[1], g.dim, h.dim
    ))
    return CompositeEmbedding(coords, g, h, na, metric)

def evaluate_distortion(dm, emb, eps):
    """
    Scan every pair: ratio extremes over all pairs and the worst ratio
    over pairs with d_unw >= eps * n.
    """
    if emb.n_points != dm.n:
        raise EmbeddingException("Embedding has {0} points, graph has " \
            "{1}".format(emb.n_points, dm.n))
    embedded = emb.pairwise()
    i, j = np.triu_indices(dm.n, 1)
    d = dm.d[i, j]
    counted = (d > 0) & np.isfinite(d)
    ratios = np.zeros(len(d))
    ratios[counted] = embedded[i, j][counted] / d[counted]
    if np.any(counted):
        low = float(ratios[counted].min())
        high = float(ratios[counted].max())
    else:
        low = high = 1.0
    need = math.ceil(threshold(eps, dm.n)) if dm.n else 1
    hops = dm.d_unw[i, j]
    large = counted & (hops >= need) & np.isfinite(hops)
    worst, worst_pair = 0.0, None
    if np.any(large):
        index = int(np.argmax(np.where(large, ratios, -np.inf)))
        worst = float(ratios[index])
        worst_pair = (int(i[index]), int(j[index]))
    return DistortionReport(float(eps), emb.dim, low, high, worst, worst_pair,
        int(counted.sum()), int(large.sum()))
