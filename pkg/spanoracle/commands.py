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

"""
One function per command line command. Each takes a RunConfig, calls
into the library and returns a Report.
"""

from contextlib import contextmanager
from fractions import Fraction
from time import perf_counter
import json
import math

import numpy as np

from . import SpanOracleException, __version__, threshold, format_distance
from .config import Config, ConfigException
from .graph import Graph, GraphException, ReseedRequired, perturb, apsp
from .generators import generate, FAMILIES
from .nets import (NetException, UncertifiedNetException, EpsNet, PathSystem,
    verify_net, vc_dimension, build_net, build_net_greedy, build_net_sample,
    sample_budget)
from .oracles import (OracleException, QueryAnswer, build_simple, build_tz,
    build_combined, levels_for, query_simple, query_tz, query_combined)
from .codec import SerializationException, serialize_oracle, load_oracle
from .embedding import (EmbeddingException, EMODE, TOLERANCE, bourgain_embed,
    blackbox_embed, evaluate_distortion, expansion, star_expansion)

import logging

class UsageException(SpanOracleException):
    pass

class InputException(SpanOracleException):
    def __init__(self, line, message):
        super(InputException, self).__init__(
            "line {line}: {message}".format(line=line, message=message)
        )
        self.line = line

class InvariantFailure(SpanOracleException):
    pass

class EEXIT:
    OK = 0
    USAGE = 1
    INPUT = 2
    CONTRACT = 3
    INTERNAL = 4

# Most specific first.
EXIT_CODES = (
    (UsageException, EEXIT.USAGE),
    (ConfigException, EEXIT.USAGE),
    (ReseedRequired, EEXIT.INTERNAL),
    (InvariantFailure, EEXIT.INTERNAL),
    (UncertifiedNetException, EEXIT.CONTRACT),
    (OracleException, EEXIT.CONTRACT),
    (InputException, EEXIT.INPUT),
    (GraphException, EEXIT.INPUT),
    (NetException, EEXIT.INPUT),
    (SerializationException, EEXIT.INPUT),
    (EmbeddingException, EEXIT.INPUT),
    (EnvironmentError, EEXIT.INPUT),
)

def exit_code_for(e):
    for cls, code in EXIT_CODES:
        if isinstance(e, cls):
            return code
    return EEXIT.INTERNAL

class RunConfig(object):
    FIELDS = ("command", "graph_path", "eps", "delta", "k", "m", "seed",
        "method", "mode", "output_path", "pairs_path", "pairs", "net_path",
        "kind", "family", "params", "max_size", "threads")

    def __init__(self, command, graph_path=None, eps=None, delta=None, k=None,
        m=None, seed=None, method=None, mode=None, output_path=None,
        pairs_path=None, pairs=None, net_path=None, kind=None, family=None,
        params=None, max_size=3, config=None):
        """
        Everything one command needs. Options left as None take their
        value from the configuration.
        :param config: Config object, defaults when None.
        """
        if command not in COMMANDS:
            raise UsageException("Unknown command '{0}', expected one of " \
                "{1}".format(command, ", ".join(sorted(COMMANDS))))
        if eps is not None and not 0 < eps <= 1:
            raise UsageException("--eps must be in (0, 1], got {0}".format(
                eps
            ))
        if delta is not None and not 0 < delta <= 1:
            raise UsageException("--delta must be in (0, 1], got {0}".format(
                delta
            ))
        if k is not None and k < 1:
            raise UsageException("--k must be a positive integer")
        if m is not None and m < 1:
            raise UsageException("--m must be a positive integer")
        self.config = config or Config()
        self.command = command
        self.graph_path = graph_path
        self.eps = eps
        self.delta = delta
        self.k = k
        self.m = self.config.star_m if m is None else m
        self.seed = self.config.seed if seed is None else seed
        self.method = self.config.net_method if method is None else method
        if self.method not in EpsNet.EMETHOD.ALL:
            raise UsageException("--method must be one of {0}".format(
                ", ".join(EpsNet.EMETHOD.ALL)
            ))
        self.mode = self.config.star_mode if mode is None else mode
        if self.mode not in EMODE.ALL:
            raise UsageException("--mode must be one of {0}".format(
                ", ".join(EMODE.ALL)
            ))
        self.output_path = output_path
        self.pairs_path = pairs_path
        self.pairs = pairs
        self.net_path = net_path
        self.kind = kind
        self.family = family
        self.params = dict(params or {})
        self.max_size = max_size
        self.threads = self.config.threads

    @property
    def sampling(self):
        return {
            "max_retries": self.config.max_retries,
            "c1": self.config.sample_c1,
            "c2": self.config.sample_c2,
        }

    def need(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise UsageException("{0} needs --{1}".format(
                    self.command, OPTION_NAMES.get(name, name)
                ))

    def as_dict(self):
        echo = dict((name, getattr(self, name)) for name in self.FIELDS)
        return dict((key, value) for key, value in echo.items()
            if value is not None and value != {})

OPTION_NAMES = {
    "graph_path": "in",
    "output_path": "out",
    "pairs_path": "pairs",
    "net_path": "net",
    "max_size": "max-size",
}

def plain(value):
    """
    Turn a result into something json can write with a stable layout:
    numpy scalars and arrays to Python, tuples to lists, fractions to
    floats and non-finite floats to the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, dict):
        return dict((str(k), plain(v)) for k, v in value.items())
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        if math.isnan(value):
            return "nan"
        return "inf" if value > 0 else "-inf"
    return value

def dumps(payload):
    return json.dumps(plain(payload), sort_keys=True, indent=2)

class Report(object):
    def __init__(self, cfg):
        """
        Machine readable outcome of one command.
        :param cfg: the RunConfig that was run.
        """
        self.cfg = cfg
        self.timings = {}
        self.sizes = {}
        self.result = {}
        self.lines = []

    @contextmanager
    def phase(self, name):
        """
        Time the body of the with block as `name`.
        """
        start = perf_counter()
        yield
        self.timings[name] = perf_counter() - start
        logging.debug("Phase {0} took {1:.3f}s".format(
            name, self.timings[name]
        ))

    def to_dict(self, timing=True):
        payload = {
            "command": self.cfg.command,
            "config": self.cfg.as_dict(),
            "settings": self.cfg.config.as_dict(),
            "sizes": self.sizes,
            "result": self.result,
            "version": __version__,
        }
        if timing:
            payload["timing"] = self.timings
        return payload

    def to_json(self, timing=True):
        return dumps(self.to_dict(timing))

class ErrorReport(object):
    def __init__(self, cfg, error, exit_code):
        self.cfg = cfg
        self.error = error
        self.exit_code = exit_code
        self.lines = []

    def to_dict(self, timing=True):
        error = {
            "type": self.error.__class__.__name__,
            "message": str(self.error),
            "exit_code": self.exit_code,
        }
        witness = getattr(self.error, "witness", None)
        if witness is not None:
            error["witness"] = witness
        line = getattr(self.error, "line", None)
        if line is not None:
            error["line"] = line
        payload = {"error": error}
        if self.cfg is not None:
            payload["command"] = self.cfg.command
        return payload

    def to_json(self, timing=True):
        return dumps(self.to_dict(timing))

def read_pairs(s):
    """
    Parse a pairs file: one `v1 v2` per line, `#` starts a comment.
    """
    found = []
    for line_number, raw in enumerate(s.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise InputException(line_number, "expected `v1 v2`")
        try:
            found.append((int(tokens[0]), int(tokens[1])))
        except ValueError:
            raise InputException(line_number, "vertex ids must be integers")
    return found

def pairs_from_args(args):
    if len(args) % 2:
        raise UsageException("Query pairs need an even number of vertex ids")
    try:
        ids = [int(a) for a in args]
    except ValueError:
        raise UsageException("Query pairs must be integers")
    return list(zip(ids[::2], ids[1::2]))

def _graph(cfg):
    cfg.need("graph_path")
    graph = Graph.from_path(cfg.graph_path)
    logging.info("Loaded {0}: {1} vertices, {2} edges".format(
        cfg.graph_path, graph.n, graph.m
    ))
    return graph

def _distances(cfg, graph, report):
    with report.phase("apsp"):
        return apsp(perturb(graph, cfg.seed), cfg.threads)

def _landmark_net(cfg, dm, report):
    """
    The net named by --net, certified against the graph, or a new one.
    """
    with report.phase("net"):
        if cfg.net_path:
            net = EpsNet.from_path(cfg.net_path)
            return net.certify(dm, net.eps if cfg.eps is None else cfg.eps)
        cfg.need("eps")
        return build_net(dm, cfg.eps, cfg.method, cfg.seed, **cfg.sampling)

def _net_result(net):
    return {
        "eps": net.eps,
        "method": net.method,
        "certified": net.certified,
        "vertices": net.vertices,
    }

def cmd_gen(cfg):
    cfg.need("family", "output_path")
    if cfg.family not in FAMILIES:
        raise UsageException("--family must be one of {0}".format(
            ", ".join(sorted(FAMILIES))
        ))
    report = Report(cfg)
    with report.phase("generate"):
        graph = generate(cfg.family, seed=cfg.seed, **cfg.params)
    with open(cfg.output_path, "w") as f:
        graph.save(f)
    report.sizes.update(n=graph.n, m=graph.m)
    report.result.update(family=cfg.family, weighted=graph.weighted,
        path=cfg.output_path)
    return report

def cmd_build_net(cfg):
    cfg.need("eps")
    graph = _graph(cfg)
    report = Report(cfg)
    dm = _distances(cfg, graph, report)
    with report.phase("net"):
        net = build_net(dm, cfg.eps, cfg.method, cfg.seed, **cfg.sampling)
    if cfg.output_path:
        with open(cfg.output_path, "w") as f:
            net.save(f)
    report.sizes.update(n=graph.n, net=net.size,
        budget=sample_budget(cfg.eps, cfg.config.sample_c1,
            cfg.config.sample_c2),
        qualifying_pairs=len(dm.qualifying_pairs(cfg.eps)))
    report.result.update(_net_result(net))
    return report

def cmd_verify_net(cfg):
    cfg.need("net_path")
    graph = _graph(cfg)
    net = EpsNet.from_path(cfg.net_path)
    eps = net.eps if cfg.eps is None else cfg.eps
    report = Report(cfg)
    dm = _distances(cfg, graph, report)
    with report.phase("verify"):
        verdict = verify_net(dm, eps, net.vertices)
    if not verdict.certified:
        raise UncertifiedNetException("Pair {0} has no net vertex on its " \
            "canonical path".format(verdict.witness), verdict.witness)
    report.sizes.update(n=graph.n, net=net.size,
        qualifying_pairs=verdict.checked)
    report.result.update(certified=True, eps=eps)
    return report

def cmd_build_oracle(cfg):
    cfg.need("kind", "output_path")
    graph = _graph(cfg)
    report = Report(cfg)
    if cfg.kind == "simple":
        dm = _distances(cfg, graph, report)
        net = _landmark_net(cfg, dm, report)
        with report.phase("build"):
            oracle = build_simple(graph, net, cfg.seed, cfg.threads)
        report.sizes.update(landmarks=len(oracle.landmarks))
    elif cfg.kind == "tz":
        cfg.need("k")
        with report.phase("build"):
            oracle = build_tz(graph, cfg.k, cfg.seed,
                cfg.config.tz_max_resamples)
        report.sizes.update(bunch_entries=oracle.bunch_total)
    elif cfg.kind == "combined":
        cfg.need("eps", "delta")
        with report.phase("build"):
            oracle = build_combined(graph, cfg.eps, cfg.delta, cfg.seed,
                cfg.method, cfg.threads, cfg.config.tz_max_resamples,
                **cfg.sampling)
        report.sizes.update(landmarks=len(oracle.landmark.landmarks),
            bunch_entries=oracle.tz.bunch_total)
        report.result.update(k=oracle.k, net_eps=oracle.landmark.eps)
    else:
        raise UsageException("--kind must be simple, tz or combined")
    with report.phase("serialize"):
        data = serialize_oracle(oracle)
    with open(cfg.output_path, "wb") as f:
        f.write(data)
    report.sizes.update(n=graph.n, entries=oracle.size, bytes=len(data))
    report.result.update(kind=cfg.kind, path=cfg.output_path)
    return report

def answer(oracle, v1, v2):
    """
    One query against any oracle kind, as printed by `query`.
    """
    value = oracle.query(v1, v2)
    if isinstance(value, QueryAnswer):
        return str(value)
    return format_distance(value)

def cmd_query(cfg):
    """
    --in names the oracle file. Pairs come from --pairs or the arguments.
    """
    cfg.need("graph_path")
    if cfg.pairs_path:
        with open(cfg.pairs_path) as f:
            queries = read_pairs(f.read())
    else:
        queries = list(cfg.pairs or [])
    report = Report(cfg)
    with report.phase("load"):
        oracle = load_oracle(cfg.graph_path)
    with report.phase("query"):
        answers = [answer(oracle, v1, v2) for v1, v2 in queries]
    report.lines = answers
    report.sizes.update(queries=len(queries), entries=oracle.size)
    report.result.update(pairs=queries, answers=answers)
    return report

def _base_embedder(cfg):
    return lambda metric, seed: bourgain_embed(metric, seed,
        cfg.config.bourgain_c3)

def cmd_eval_embed(cfg):
    graph = _graph(cfg)
    report = Report(cfg)
    dm = _distances(cfg, graph, report)
    net = _landmark_net(cfg, dm, report)
    eps = net.eps if cfg.eps is None else cfg.eps
    with report.phase("embed"):
        emb = blackbox_embed(dm, net, _base_embedder(cfg), cfg.mode, cfg.seed,
            cfg.m)
    with report.phase("evaluate"):
        distortion = evaluate_distortion(dm, emb, eps)
        base_expansion = expansion(emb.metric, emb.base)
        star = star_expansion(emb.assignment, emb.star)
    factor = 1 if cfg.mode == EMODE.EXACT else 4
    bound = 3 * (base_expansion + factor * star)
    if cfg.output_path:
        with open(cfg.output_path, "w") as f:
            emb.save(f)
    report.sizes.update(n=graph.n, net=len(emb.assignment.landmarks),
        dim=emb.dim)
    report.result.update(distortion.to_dict())
    report.result.update(base_expansion=base_expansion,
        star_expansion=star, composition_bound=bound)
    if distortion.min_ratio_all < 1 - TOLERANCE:
        raise InvariantFailure("Embedding contracts a pair by {0}".format(
            distortion.min_ratio_all
        ))
    if distortion.max_ratio_large > bound * (1 + TOLERANCE):
        raise InvariantFailure("Pair {0} expands by {1}, above {2}".format(
            distortion.worst_large_pair, distortion.max_ratio_large, bound
        ))
    return report

def cmd_vc_check(cfg):
    graph = _graph(cfg)
    report = Report(cfg)
    dm = _distances(cfg, graph, report)
    ps = PathSystem(dm)
    with report.phase("shatter"):
        dimension = vc_dimension(ps, cfg.max_size)
        witness = next(ps.shattered_sets(dimension), None) if dimension \
            else None
    report.sizes.update(n=graph.n, ranges=len(ps.ranges))
    report.result.update(vc_dimension=dimension, witness=witness,
        max_size=cfg.max_size)
    if dimension > 2:
        raise InvariantFailure("Shattered set {0} of size {1} with unique " \
            "shortest paths".format(witness, dimension))
    return report

def _pairs_stats(dm, oracles):
    """
    All-pairs checks of the built oracles against the exact distances.
    """
    tz, simple, combined, eps = oracles
    need = threshold(eps, dm.n)
    stretch = 1.0
    exact_large = large = wrong = 0
    for v1 in range(dm.n):
        for v2 in range(v1 + 1, dm.n):
            d = dm.exact(v1, v2)
            if d == math.inf:
                continue
            stretch = max(stretch, float(query_tz(tz, v1, v2) / d))
            if dm.d_unw[v1, v2] >= need:
                large += 1
                exact_large += query_simple(simple, v1, v2) == d
            if combined is not None:
                got = query_combined(combined, v1, v2)
                wanted = QueryAnswer.bottom() if d < need else \
                    QueryAnswer.exact(d)
                wrong += got != wanted
    return {
        "tz_max_stretch": stretch,
        "landmark_exact_large": exact_large,
        "large_pairs": large,
        "combined_wrong": wrong if combined is not None else None,
    }

def cmd_bench(cfg):
    """
    Every construction on one graph with timings, sizes and all-pairs
    accuracy checks.
    """
    cfg.need("eps", "delta")
    graph = _graph(cfg)
    report = Report(cfg)
    dm = _distances(cfg, graph, report)
    with report.phase("net_greedy"):
        greedy = build_net_greedy(dm, cfg.eps, cfg.seed)
    with report.phase("net_sample"):
        sampled = build_net_sample(dm, cfg.eps, cfg.seed, **cfg.sampling)
    with report.phase("simple"):
        simple = build_simple(graph, greedy, cfg.seed, cfg.threads)
    k = cfg.k or levels_for(cfg.delta)
    with report.phase("tz"):
        tz = build_tz(graph, k, cfg.seed, cfg.config.tz_max_resamples)
    combined = None
    if not graph.weighted:
        with report.phase("combined"):
            combined = build_combined(graph, cfg.eps, cfg.delta, cfg.seed,
                cfg.method, cfg.threads, cfg.config.tz_max_resamples,
                **cfg.sampling)
    with report.phase("check"):
        stats = _pairs_stats(dm, (tz, simple, combined, cfg.eps))
    distortion = None
    if np.all(np.isfinite(dm.d)):
        with report.phase("embed"):
            emb = blackbox_embed(dm, greedy, _base_embedder(cfg), cfg.mode,
                cfg.seed, cfg.m)
            distortion = evaluate_distortion(dm, emb, cfg.eps).to_dict()
    else:
        logging.warning("Graph is disconnected, skipping the embedding")
    report.sizes.update(
        n=graph.n, m=graph.m, k=k,
        net_greedy=greedy.size, net_sample=sampled.size,
        budget=sample_budget(cfg.eps, cfg.config.sample_c1,
            cfg.config.sample_c2),
        simple_entries=simple.size, tz_entries=tz.size,
        simple_bytes=len(serialize_oracle(simple)),
        tz_bytes=len(serialize_oracle(tz)),
    )
    if combined is not None:
        report.sizes.update(combined_entries=combined.size,
            combined_bytes=len(serialize_oracle(combined)))
    report.result.update(stats)
    report.result.update(sample_method=sampled.method, distortion=distortion)
    if stats["landmark_exact_large"] != stats["large_pairs"] or \
        stats["tz_max_stretch"] > 2 * k - 1 or stats["combined_wrong"]:
        raise InvariantFailure("Oracle answers out of bounds: {0}".format(
            stats
        ))
    return report

COMMANDS = {
    "gen": cmd_gen,
    "build-net": cmd_build_net,
    "verify-net": cmd_verify_net,
    "build-oracle": cmd_build_oracle,
    "query": cmd_query,
    "eval-embed": cmd_eval_embed,
    "vc-check": cmd_vc_check,
    "bench": cmd_bench,
}

def run(cfg):
    """
    Run one command. Returns (exit code, Report or ErrorReport).
    """
    try:
        return EEXIT.OK, COMMANDS[cfg.command](cfg)
    except Exception as e:
        code = exit_code_for(e)
        if code == EEXIT.INTERNAL:
            logging.exception("{0} failed".format(cfg.command))
        else:
            logging.error("{0} failed: {1}".format(cfg.command, e))
        return code, ErrorReport(cfg, e, code)
