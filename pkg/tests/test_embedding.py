import math
import unittest
from io import StringIO

import numpy as np

from spanoracle.graph import Graph
from spanoracle.generators import path_graph, cycle_graph, grid_graph
from spanoracle.nets import EpsNet, UncertifiedNetException, build_net_greedy
from spanoracle.embedding import (EmbeddingException, InvalidMetricException,
    BOURGAIN_LOG_CONSTANT, TOLERANCE, EMODE, Embedding, assign_net,
    star_embed, bourgain_embed, blackbox_embed, evaluate_distortion,
    expansion, star_expansion, ratio_range)

from tests.helpers import distances

def uniform_metric(size):
    return np.ones((size, size)) - np.eye(size)

def certified(eps, vertices):
    return EpsNet(eps, vertices, EpsNet.EMETHOD.GREEDY, certified=True)

class TestEmbedding(unittest.TestCase):
    def test_pairwise_is_l1(self):
        emb = Embedding([[0, 0], [1, 2], [-1, 0.5]])
        self.assertEqual(emb.n_points, 3)
        self.assertEqual(emb.dim, 2)
        self.assertEqual(emb.distance(0, 1), 3)
        self.assertEqual(emb.pairwise()[1, 2], 3.5)

    def test_zero_dimensions(self):
        emb = Embedding(np.zeros((3, 0)))
        np.testing.assert_array_equal(emb.pairwise(), np.zeros((3, 3)))

    def test_rejects_non_finite(self):
        with self.assertRaises(EmbeddingException):
            Embedding([[0, math.inf]])

    def test_text_export(self):
        emb = Embedding([[0.1, 2.0], [1 / 3, -4.5]])
        text = emb.to_string()
        self.assertTrue(text.startswith("2 2\n"))
        again = Embedding.from_file(StringIO(text))
        np.testing.assert_array_equal(again.coords, emb.coords)

    def test_bad_text(self):
        with self.assertRaises(EmbeddingException):
            Embedding.from_string("2 2\n0 0\n")

class TestBourgain(unittest.TestCase):
    def test_single_point(self):
        emb = bourgain_embed(np.zeros((1, 1)))
        self.assertEqual(emb.n_points, 1)
        self.assertEqual(emb.dim, 0)

    def test_two_points(self):
        emb = bourgain_embed(np.array([[0, 3], [3, 0]]))
        self.assertEqual(emb.distance(0, 1), 3)

    def test_uniform_metric(self):
        metric = uniform_metric(8)
        for seed in range(3):
            emb = bourgain_embed(metric, seed)
            low, high = ratio_range(metric, emb)
            self.assertGreaterEqual(low, 1 - TOLERANCE)
            self.assertAlmostEqual(low, 1)
            self.assertGreaterEqual(high, low)

    def test_log_growth(self):
        for size in (4, 8, 16, 32):
            metric = uniform_metric(size)
            for seed in range(10):
                emb = bourgain_embed(metric, seed)
                self.assertGreaterEqual(ratio_range(metric, emb)[0],
                    1 - TOLERANCE)
                self.assertLess(expansion(metric, emb) / math.log2(size),
                    BOURGAIN_LOG_CONSTANT)

    def test_net_metric(self):
        weighted_path = Graph(20, [(i, i + 1, 1 + i % 3) for i in range(19)],
            weighted=True)
        graphs = [path_graph(40), cycle_graph(30), grid_graph(8, 8),
            weighted_path]
        for index, graph in enumerate(graphs):
            dm = distances(graph)
            net = build_net_greedy(dm, 0.1)
            self.assertGreaterEqual(net.size, 2, "graph {0}".format(index))
            metric = dm.d[np.ix_(net.vertices, net.vertices)]
            for seed in range(10):
                emb = bourgain_embed(metric, seed)
                self.assertGreaterEqual(ratio_range(metric, emb)[0],
                    1 - TOLERANCE)
                self.assertLess(
                    expansion(metric, emb) / math.log2(net.size),
                    BOURGAIN_LOG_CONSTANT
                )

    def test_deterministic(self):
        metric = uniform_metric(10)
        np.testing.assert_array_equal(bourgain_embed(metric, 5).coords,
            bourgain_embed(metric, 5).coords)

    def test_invalid_metrics(self):
        with self.assertRaises(InvalidMetricException):
            bourgain_embed(np.array([[0, 1], [2, 0]]))
        with self.assertRaises(InvalidMetricException):
            bourgain_embed(np.array([[1, 1], [1, 1]]))
        with self.assertRaises(InvalidMetricException):
            bourgain_embed(np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]]))
        with self.assertRaises(InvalidMetricException):
            bourgain_embed(np.zeros((0, 0)))

class TestAssignment(unittest.TestCase):
    def setUp(self):
        self.dm = distances(path_graph(10))

    def test_single_landmark(self):
        na = assign_net(self.dm, [4])
        np.testing.assert_array_equal(na.r, [4, 3, 2, 1, 0, 1, 2, 3, 4, 5])
        self.assertTrue(all(na.nearest(v) == 4 for v in range(10)))

    def test_two_landmarks(self):
        na = assign_net(self.dm, [7, 2])
        self.assertEqual(na.nearest(4), 2)
        self.assertEqual(na.nearest(5), 7)
        self.assertEqual(na.nearest(2), 2)
        self.assertEqual(na.r[7], 0)

    def test_ties_go_to_smallest_id(self):
        na = assign_net(distances(path_graph(5)), [4, 0])
        self.assertEqual(na.nearest(2), 0)

    def test_empty(self):
        with self.assertRaises(EmbeddingException):
            assign_net(self.dm, [])

    def test_pseudo_distance(self):
        na = assign_net(self.dm, [4])
        self.assertEqual(na.pseudo_distance(2, 7), 5)
        self.assertEqual(na.pseudo_distance(3, 3), 0)

class TestStar(unittest.TestCase):
    def setUp(self):
        self.na = assign_net(distances(path_graph(10)), [4])

    def test_exact(self):
        emb = star_embed(self.na)
        self.assertEqual(emb.dim, 10)
        self.assertEqual(emb.distance(2, 7), 5)
        self.assertEqual(emb.distance(6, 6), 0)
        pseudo = self.na.pseudo_matrix()
        np.testing.assert_allclose(emb.pairwise(), pseudo, rtol=1e-12)

    def test_compressed(self):
        emb = star_embed(self.na, EMODE.COMPRESSED, seed=0, m=64)
        self.assertEqual(emb.dim, 64)
        low, high = ratio_range(self.na.pseudo_matrix(), emb)
        self.assertGreaterEqual(low, 1 - TOLERANCE)
        self.assertLessEqual(high, 4)
        self.assertEqual(star_expansion(self.na, emb), high)

    def test_sign_collisions(self):
        # ten vertices and two sign vectors
        emb = star_embed(self.na, EMODE.COMPRESSED, seed=0, m=1)
        self.assertGreater(emb.dim, 1)
        pseudo = self.na.pseudo_matrix()
        low, _ = ratio_range(pseudo, emb)
        self.assertGreaterEqual(low, 1 - TOLERANCE)
        embedded = emb.pairwise()
        for v1 in range(10):
            for v2 in range(v1 + 1, 10):
                self.assertGreater(embedded[v1, v2], 0)

    def test_unknown_mode(self):
        with self.assertRaises(EmbeddingException):
            star_embed(self.na, "sparse")

class TestBlackBox(unittest.TestCase):
    def setUp(self):
        self.dm = distances(path_graph(10))
        self.net = certified(0.5, [4])

    def test_path_of_ten(self):
        emb = blackbox_embed(self.dm, self.net)
        self.assertEqual(emb.dim, emb.base.dim + emb.star.dim)
        self.assertEqual(emb.distance(0, 9), 9)
        self.assertEqual(emb.distance(0, 1), 7)
        report = evaluate_distortion(self.dm, emb, 0.5)
        self.assertGreaterEqual(report.min_ratio_all, 1)
        self.assertEqual(report.max_ratio_large, 1)
        self.assertEqual(report.qualifying_pairs, 15)

    def test_landmarks_use_base_only(self):
        net = certified(0.3, [1, 5, 8])
        emb = blackbox_embed(self.dm, net)
        g = emb.base
        self.assertAlmostEqual(emb.distance(1, 5), g.distance(0, 1))
        self.assertAlmostEqual(emb.distance(5, 8), g.distance(1, 2))

    def test_rejects_uncertified(self):
        with self.assertRaises(UncertifiedNetException):
            blackbox_embed(self.dm, EpsNet(0.5, [4], EpsNet.EMETHOD.GREEDY))

    def test_rejects_disconnected(self):
        dm = distances(path_graph(4))
        dm.d[0, 3] = dm.d[3, 0] = math.inf
        with self.assertRaises(EmbeddingException):
            blackbox_embed(dm, certified(0.5, [0]))

    def test_empty_net(self):
        emb = blackbox_embed(self.dm, certified(1, []))
        self.assertEqual(emb.assignment.landmarks, (0,))

    def test_rejects_contracting_base(self):
        def squashed(metric, seed):
            return Embedding(np.zeros((metric.shape[0], 1)))
        with self.assertRaises(EmbeddingException):
            blackbox_embed(self.dm, certified(0.3, [1, 5, 8]), squashed)

    def test_composition_bound(self):
        for mode in EMODE.ALL:
            graph = grid_graph(6, 6)
            dm = distances(graph)
            net = build_net_greedy(dm, 0.25)
            emb = blackbox_embed(dm, net, mode=mode, seed=3)
            report = evaluate_distortion(dm, emb, 0.25)
            base = expansion(emb.metric, emb.base)
            star = star_expansion(emb.assignment, emb.star)
            factor = 1 if mode == EMODE.EXACT else 4
            self.assertGreaterEqual(report.min_ratio_all, 1 - TOLERANCE)
            self.assertLessEqual(report.max_ratio_large,
                3 * (base + factor * star) * (1 + TOLERANCE))

class TestDistortion(unittest.TestCase):
    def test_two_points(self):
        dm = distances(path_graph(2))
        report = evaluate_distortion(dm, Embedding([[0.0], [1.0]]), 0.5)
        self.assertEqual(report.min_ratio_all, 1)
        self.assertEqual(report.max_ratio_all, 1)
        self.assertEqual(report.worst_large_pair, (0, 1))

    def test_no_qualifying_pairs(self):
        dm = distances(path_graph(10))
        emb = blackbox_embed(dm, certified(0.5, [4]))
        report = evaluate_distortion(dm, emb, 1)
        self.assertEqual(report.max_ratio_large, 0)
        self.assertIsNone(report.worst_large_pair)
        self.assertFalse(report.to_dict()["has_qualifying_pairs"])

    def test_size_mismatch(self):
        dm = distances(path_graph(3))
        with self.assertRaises(EmbeddingException):
            evaluate_distortion(dm, Embedding(np.zeros((2, 1))), 0.5)
