import unittest
from fractions import Fraction
from struct import pack

from spanoracle.generators import path_graph, gnp_graph
from spanoracle.nets import build_net_greedy
from spanoracle.oracles import (SimpleOracle, build_simple, build_tz,
    build_combined)
from spanoracle.codec import (SerializationException, BadMagicException,
    VersionMismatchException, TruncatedException, ChecksumException, HEADER,
    serialize_oracle, deserialize_oracle, kind_of, EKIND)

from tests.helpers import distances, decimal_path

def all_answers(oracle):
    return [oracle.query(v1, v2) for v1 in range(oracle.n)
        for v2 in range(oracle.n)]

class TestRoundTrip(unittest.TestCase):
    def test_simple(self):
        graph = path_graph(10)
        oracle = build_simple(graph, build_net_greedy(distances(graph), 0.5))
        again = deserialize_oracle(serialize_oracle(oracle))
        self.assertEqual(kind_of(again), EKIND.SIMPLE)
        self.assertEqual(again.landmarks, oracle.landmarks)
        self.assertEqual(again.eps, oracle.eps)
        self.assertEqual(all_answers(again), all_answers(oracle))

    def test_empty_simple(self):
        graph = path_graph(6)
        oracle = build_simple(graph, build_net_greedy(distances(graph), 1))
        again = deserialize_oracle(serialize_oracle(oracle))
        self.assertEqual(again.table.shape, (0, 6))
        self.assertEqual(all_answers(again), all_answers(oracle))

    def test_tz_with_unreachable_pivots(self):
        graph = gnp_graph(30, 0.05, seed=3)
        oracle = build_tz(graph, 3, seed=-2)
        again = deserialize_oracle(serialize_oracle(oracle))
        self.assertEqual(again.levels, oracle.levels)
        self.assertEqual(again.pivots, oracle.pivots)
        self.assertEqual(again.bunches, oracle.bunches)
        self.assertEqual(all_answers(again), all_answers(oracle))

    def test_combined(self):
        oracle = build_combined(gnp_graph(64, 0.1, seed=1), 0.25, 0.5, seed=7)
        data = serialize_oracle(oracle)
        again = deserialize_oracle(data)
        self.assertEqual((again.eps, again.delta, again.k),
            (oracle.eps, oracle.delta, oracle.k))
        self.assertEqual(all_answers(again), all_answers(oracle))
        self.assertEqual(serialize_oracle(again), data)

class TestDamage(unittest.TestCase):
    def setUp(self):
        graph = path_graph(10)
        self.data = serialize_oracle(
            build_simple(graph, build_net_greedy(distances(graph), 0.5))
        )

    def test_truncated(self):
        with self.assertRaises(TruncatedException):
            deserialize_oracle(self.data[:-3])
        with self.assertRaises(TruncatedException):
            deserialize_oracle(self.data[:8])

    def test_bad_magic(self):
        with self.assertRaises(BadMagicException):
            deserialize_oracle(b"GRAPH" + self.data[5:])

    def test_version(self):
        damaged = self.data[:5] + pack("<H", 2) + self.data[7:]
        with self.assertRaises(VersionMismatchException):
            deserialize_oracle(damaged)

    def test_checksum(self):
        index = HEADER.size + 4
        damaged = self.data[:index] + bytes([self.data[index] ^ 0xff]) + \
            self.data[index + 1:]
        with self.assertRaises(ChecksumException):
            deserialize_oracle(damaged)

    def test_trailing_bytes(self):
        with self.assertRaises(SerializationException):
            deserialize_oracle(self.data + b"\0")

    def test_not_an_oracle(self):
        with self.assertRaises(SerializationException):
            serialize_oracle(object())

class TestExactDistances(unittest.TestCase):
    def test_decimal_weights_survive(self):
        graph, exact = decimal_path()
        oracles = [
            build_simple(graph, build_net_greedy(distances(graph), 0.5)),
            build_tz(graph, 2, seed=0),
        ]
        for oracle in oracles:
            again = deserialize_oracle(serialize_oracle(oracle))
            self.assertEqual(all_answers(again), all_answers(oracle))
        again = deserialize_oracle(serialize_oracle(oracles[0]))
        self.assertEqual(again.query(0, 5), Fraction("1.3"))
        self.assertEqual(again.query(0, 5), exact(0, 5))

    def test_oversized_distance(self):
        oracle = SimpleOracle(0.5, [0], [[0, Fraction(1, 2 ** 70)]])
        with self.assertRaises(SerializationException):
            serialize_oracle(oracle)
