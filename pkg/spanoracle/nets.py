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
from itertools import combinations
import math

from bitarray.util import zeros

from . import SpanOracleException, rng
from .graph import on_canonical_path

import logging

class NetException(SpanOracleException):
    pass

class UncertifiedNetException(NetException):
    def __init__(self, message, witness=None):
        super(UncertifiedNetException, self).__init__(message)
        self.witness = witness

DEFAULT_C1 = 8
DEFAULT_C2 = 16
DEFAULT_MAX_RETRIES = 5

class PathSystem(object):
    MAX_SUBSET = 4

    def __init__(self, dm):
        """
        The set system whose ranges are the vertex sets of canonical
        shortest paths, single vertices included.
        :param dm: DistanceMatrix object.
        """
        self.dm = dm
        self._ranges = None

    @property
    def ranges(self):
        """
        Every range as a bitarray over the vertices.
        """
        if self._ranges is None:
            n = self.dm.n
            ranges = []
            for v in range(n):
                single = zeros(n)
                single[v] = 1
                ranges.append(single)
            for v1 in range(n):
                for v2 in range(v1 + 1, n):
                    path = self.dm.canonical_path(v1, v2)
                    if not path:
                        continue
                    mask = zeros(n)
                    for v in path:
                        mask[v] = 1
                    ranges.append(mask)
            self._ranges = ranges
        return self._ranges

    def traces(self, subset):
        """
        The distinct intersections of `subset` with the ranges, each as a
        tuple of membership flags. The empty intersection always counts as
        realised.
        """
        found = set([(False,) * len(subset)])
        for mask in self.ranges:
            found.add(tuple(bool(mask[v]) for v in subset))
        return found

    def shattered_sets(self, size):
        """
        Generator of every shattered vertex subset of the given size.
        """
        for subset in combinations(range(self.dm.n), size):
            if is_shattered(self, subset):
                yield subset

def is_shattered(ps, subset):
    """
    True when every subset of `subset` is its intersection with a range.
    :param ps: PathSystem object.
    :param subset: at most PathSystem.MAX_SUBSET vertex ids.
    """
    subset = sorted(set(subset))
    if len(subset) > ps.MAX_SUBSET:
        raise NetException("Shattering is checked for at most {0} " \
            "vertices, got {1}".format(ps.MAX_SUBSET, len(subset)))
    return len(ps.traces(subset)) == 2 ** len(subset)

def vc_dimension(ps, max_size=PathSystem.MAX_SUBSET):
    """
    Size of the largest shattered subset with at most `max_size` vertices.
    Stops at the first size with nothing shattered since subsets of a
    shattered set are shattered.
    """
    if max_size > ps.MAX_SUBSET:
        raise NetException("max_size must be at most {0}".format(
            ps.MAX_SUBSET
        ))
    best = 0
    for size in range(1, min(max_size, ps.dm.n) + 1):
        witness = next(ps.shattered_sets(size), None)
        if witness is None:
            break
        logging.debug("Shattered set of size {0}: {1}".format(size, witness))
        best = size
    return best

class EpsNet(object):
    class EMETHOD:
        GREEDY = "greedy"
        SAMPLE = "sample"
        ALL = ("greedy", "sample")

    @classmethod
    def from_path(cls, path):
        """
        Load a net written by `to_string`. Loaded nets are not certified
        until they have been checked against a graph.
        :param path: path as string to the net file.
        """
        with open(path) as f:
            return cls.from_file(f)

    @classmethod
    def from_file(cls, f):
        return cls.from_string(f.read())

    @classmethod
    def from_string(cls, s):
        lines = [line.strip() for line in s.splitlines() if line.strip()]
        fields = {}
        for name in ("eps", "method", "seed", "size"):
            if not lines:
                raise NetException("Net text ends before '{0}'".format(name))
            key, _, value = lines.pop(0).partition(" ")
            if key != name:
                raise NetException("Expected '{0}', found '{1}'".format(
                    name, key
                ))
            fields[name] = value.strip()
        try:
            size = int(fields["size"])
            vertices = [int(line) for line in lines]
            eps = float(fields["eps"])
            seed = int(fields["seed"])
        except ValueError as e:
            raise NetException("Malformed net text: {0}".format(e))
        if len(vertices) != size:
            raise NetException("Net declares {0} vertices, lists {1}".format(
                size, len(vertices)
            ))
        return cls(eps, vertices, fields["method"], seed=seed)

    def __init__(self, eps, vertices, method, seed=0, certified=False):
        """
        A vertex set meant to hit every canonical path with at least
        eps * n hops.
        :param eps: real in (0, 1], float or Fraction.
        :param vertices: iterable of vertex ids.
        :param method: one of EMETHOD.ALL.
        :param seed: seed the net was sampled with.
        :param certified: whether the net has been checked.
        """
        if not 0 < eps <= 1:
            raise NetException("eps must be in (0, 1], got {0}".format(eps))
        if method not in self.EMETHOD.ALL:
            raise NetException("Unknown net method '{0}'".format(method))
        vertices = sorted(set(int(v) for v in vertices))
        if vertices and vertices[0] < 0:
            raise NetException("Negative vertex id in net")
        self.eps = eps
        self.vertices = tuple(vertices)
        self.method = method
        self.seed = seed
        self.certified = certified

    @property
    def size(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.vertices

    def to_string(self):
        lines = [
            "eps {0!r}".format(float(self.eps)),
            "method {0}".format(self.method),
            "seed {0}".format(self.seed),
            "size {0}".format(self.size),
        ]
        lines.extend(str(v) for v in self.vertices)
        return "\n".join(lines) + "\n"

    def save(self, f):
        f.write(self.to_string())

    def certify(self, dm, eps=None):
        """
        Check the net against a graph. Returns a certified copy, raises
        UncertifiedNetException with the failing pair otherwise.
        :param dm: DistanceMatrix of the graph.
        :param eps: threshold to check at, the net's own eps by default.
        """
        eps = self.eps if eps is None else eps
        verdict = verify_net(dm, eps, self.vertices)
        if not verdict.certified:
            raise UncertifiedNetException("Pair {0} has no net vertex on " \
                "its canonical path".format(verdict.witness), verdict.witness)
        return EpsNet(eps, self.vertices, self.method, self.seed, True)

NetVerdict = namedtuple("NetVerdict", "certified witness checked")

def verify_net(dm, eps, vertices):
    """
    Check every pair with d_unw >= eps * n for a net vertex on its
    canonical path.
    :param dm: DistanceMatrix object.
    :param eps: threshold fraction.
    :param vertices: candidate net.
    Returns NetVerdict; the witness is the lexicographically smallest
    failing pair.
    """
    members = sorted(set(vertices))
    for v in members:
        if not 0 <= v < dm.n:
            raise NetException("Net vertex {0} out of range for n = " \
                "{1}".format(v, dm.n))
    inside = set(members)
    checked = 0
    for v1, v2 in dm.qualifying_pairs(eps):
        checked += 1
        if v1 in inside or v2 in inside:
            continue
        if not any(on_canonical_path(dm, v1, v2, u) for u in members):
            return NetVerdict(False, (v1, v2), checked)
    return NetVerdict(True, None, checked)

def build_net_greedy(dm, eps, seed=0):
    """
    Greedy hitting set of the canonical paths of all qualifying pairs:
    repeatedly take the vertex on the most uncovered paths, smallest id
    first on ties.
    :param dm: DistanceMatrix object.
    :param eps: threshold fraction.
    """
    qualifying = dm.qualifying_pairs(eps)
    covers = [zeros(len(qualifying)) for _ in range(dm.n)]
    for index, (v1, v2) in enumerate(qualifying):
        for v in dm.canonical_path(v1, v2):
            covers[v][index] = 1
    uncovered = ~zeros(len(qualifying))
    chosen = []
    while uncovered.any():
        best, best_count = None, 0
        for v in range(dm.n):
            count = (covers[v] & uncovered).count()
            if count > best_count:
                best, best_count = v, count
        logging.debug("Net vertex {0} covers {1} more paths".format(
            best, best_count
        ))
        chosen.append(best)
        uncovered &= ~covers[best]
    logging.info("Greedy net for eps {0}: {1} vertices over {2} " \
        "qualifying pairs".format(float(eps), len(chosen), len(qualifying)))
    return EpsNet(eps, chosen, EpsNet.EMETHOD.GREEDY, seed=seed,
        certified=True)

def sample_budget(eps, c1=DEFAULT_C1, c2=DEFAULT_C2):
    """
    Sample size m = ceil((c1 * 2 / eps) * ln(1 / eps) + c2 / eps), the
    net size bound for VC-dimension 2.
    """
    eps = float(eps)
    return int(math.ceil((c1 * 2 / eps) * math.log(1 / eps) + c2 / eps))

def build_net_sample(dm, eps, seed=0, max_retries=DEFAULT_MAX_RETRIES,
    c1=DEFAULT_C1, c2=DEFAULT_C2):
    """
    Uniform sample of `sample_budget` vertices with replacement, verified.
    Failed samples are redrawn up to `max_retries` times before falling
    back to the greedy net.
    """
    budget = sample_budget(eps, c1, c2)
    if dm.n == 0:
        return EpsNet(eps, [], EpsNet.EMETHOD.SAMPLE, seed, certified=True)
    for attempt in range(max_retries + 1):
        drawn = rng(seed, 3, attempt).integers(0, dm.n, size=budget)
        verdict = verify_net(dm, eps, drawn.tolist())
        if verdict.certified:
            net = EpsNet(eps, drawn.tolist(), EpsNet.EMETHOD.SAMPLE, seed,
                certified=True)
            logging.info("Sampled net for eps {0}: {1} distinct of {2} " \
                "draws, attempt {3}".format(
                    float(eps), net.size, budget, attempt
                ))
            return net
        logging.info("Sampled net missed pair {0}, resampling".format(
            verdict.witness
        ))
    logging.warning("Sampling failed {0} times for eps {1}, using the " \
        "greedy net".format(max_retries + 1, float(eps)))
    greedy = build_net_greedy(dm, eps, seed)
    return EpsNet(eps, greedy.vertices, EpsNet.EMETHOD.GREEDY, seed,
        certified=True)

def build_net(dm, eps, method=EpsNet.EMETHOD.GREEDY, seed=0, **sampling):
    """
    Dispatch on the net method.
    :param sampling: max_retries, c1, c2 for the sampled method.
    """
    if method == EpsNet.EMETHOD.GREEDY:
        return build_net_greedy(dm, eps, seed)
    if method == EpsNet.EMETHOD.SAMPLE:
        return build_net_sample(dm, eps, seed, **sampling)
    raise NetException("Unknown net method '{0}'".format(method))
