import os
import unittest
from io import StringIO
from unittest import mock

from spanoracle.config import Config, ConfigException, THREADS_ENV, load_config

class TestConfig(unittest.TestCase):
    def setUp(self):
        patcher = mock.patch.dict(os.environ)
        patcher.start()
        self.addCleanup(patcher.stop)
        os.environ.pop(THREADS_ENV, None)

    def test_defaults(self):
        config = load_config()
        self.assertEqual(config.seed, 0)
        self.assertEqual(config["net_method"], "greedy")
        self.assertEqual(config.sample_c1, 8)
        self.assertEqual(config.sample_c2, 16)
        self.assertEqual(config.bourgain_c3, 4)
        self.assertEqual(config.threads, 1)

    def test_yaml_overrides(self):
        config = Config.from_file(StringIO("seed: 42\nstar_mode: compressed\n"))
        self.assertEqual(config.seed, 42)
        self.assertEqual(config.star_mode, "compressed")
        self.assertEqual(config.star_m, 64)

    def test_empty_file(self):
        self.assertEqual(Config.from_file(StringIO("")).as_dict(),
            Config.DEFAULTS)

    def test_unknown_key(self):
        with self.assertRaises(ConfigException):
            Config({"sed": 1})

    def test_not_a_mapping(self):
        with self.assertRaises(ConfigException):
            Config.from_file(StringIO("- 1\n- 2\n"))
        with self.assertRaises(ConfigException):
            Config.from_file(StringIO("seed: [1\n"))

    def test_thread_cap_from_environment(self):
        os.environ[THREADS_ENV] = "4"
        self.assertEqual(Config({"threads": 2}).threads, 2)
        os.environ[THREADS_ENV] = "2"
        self.assertEqual(Config({"threads": 4}).threads, 2)
        os.environ[THREADS_ENV] = "8"
        self.assertEqual(Config().threads, 1)
        os.environ[THREADS_ENV] = "0"
        self.assertEqual(Config({"threads": 4}).threads, 1)
        os.environ[THREADS_ENV] = "many"
        with self.assertRaises(ConfigException):
            Config()

    def test_missing_attribute(self):
        with self.assertRaises(AttributeError):
            Config().colour
