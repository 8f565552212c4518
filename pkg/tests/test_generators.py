import unittest

from spanoracle.generators import (GeneratorException, generate, path_graph,
    cycle_graph, grid_graph, gnp_graph, geometric_graph)

class TestFamilies(unittest.TestCase):
    def test_path(self):
        graph = generate("path", n=10)
        self.assertEqual(graph.n, 10)
        self.assertEqual(graph.m, 9)
        self.assertFalse(graph.weighted)
        self.assertTrue(all(w == 1 for _, _, w in graph.edges))

    def test_grid(self):
        graph = grid_graph(5, 5)
        self.assertEqual(graph.n, 25)
        self.assertEqual(graph.m, 40)

    def test_cycle(self):
        self.assertEqual(cycle_graph(12).m, 12)
        with self.assertRaises(GeneratorException):
            cycle_graph(2)

    def test_gnp_is_deterministic(self):
        first = generate("gnp", n=100, p=0.05, seed=1)
        second = generate("gnp", n=100, p=0.05, seed=1)
        self.assertEqual(first.to_string(), second.to_string())
        self.assertNotEqual(first.to_string(),
            generate("gnp", n=100, p=0.05, seed=2).to_string())

    def test_gnp_extremes(self):
        self.assertEqual(gnp_graph(6, 0).m, 0)
        self.assertEqual(gnp_graph(6, 1).m, 15)

    def test_weighted_gnp_uses_integer_weights(self):
        graph = gnp_graph(30, 0.3, seed=3, weighted=True, max_weight=10)
        self.assertTrue(graph.weighted)
        for _, _, w in graph.edges:
            self.assertIsInstance(w, int)
            self.assertTrue(1 <= w <= 10)

    def test_geometric(self):
        graph = geometric_graph(40, 0.3, seed=2)
        self.assertTrue(all(w >= 1 for _, _, w in graph.edges))
        self.assertEqual(graph.to_string(),
            geometric_graph(40, 0.3, seed=2).to_string())
        self.assertFalse(geometric_graph(40, 0.3, seed=2,
            weighted=False).weighted)

    def test_unknown_family(self):
        with self.assertRaises(GeneratorException):
            generate("tree", n=4)

    def test_missing_parameter(self):
        with self.assertRaises(GeneratorException):
            generate("gnp", n=10)
        with self.assertRaises(GeneratorException):
            path_graph(0)
