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

import os

import yaml

import logging

from . import SpanOracleException

THREADS_ENV = "SPAN_ORACLE_THREADS"

class ConfigException(SpanOracleException):
    pass

class Config(object):
    DEFAULTS = {
        "seed": 0,
        "net_method": "greedy",
        # sampled net budget: ceil((c1 * 2 / eps) * ln(1 / eps) + c2 / eps)
        "sample_c1": 8,
        "sample_c2": 16,
        "max_retries": 5,
        # Bourgain repetitions per scale: ceil(c3 * log2(|U| + 1))
        "bourgain_c3": 4,
        "star_mode": "exact",
        "star_m": 64,
        "tz_max_resamples": 64,
        "threads": 1,
    }

    @classmethod
    def from_path(cls, path):
        """
        Load configuration from a YAML file on disk.
        :param path: path as string to the YAML file.
        """
        with open(path) as f:
            return cls.from_file(f)

    @classmethod
    def from_file(cls, f):
        """
        Load configuration from a YAML file object.
        :param f: file object holding a YAML mapping.
        """
        try:
            loaded = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigException("Configuration is not valid YAML: " \
                "{0}".format(e))
        if not isinstance(loaded, dict):
            raise ConfigException("Configuration must be a YAML mapping")
        return cls(loaded)

    def __init__(self, config=None):
        """
        Tunables with documented defaults. Unknown keys are rejected so a
        typo does not silently fall back to a default.
        :param config: dictionary of overrides.
        """
        config = config or {}
        unknown = set(config) - set(self.DEFAULTS)
        if unknown:
            raise ConfigException("Unknown configuration keys: {0}".format(
                ", ".join(sorted(unknown))
            ))
        self._config = dict(self.DEFAULTS)
        self._config.update(config)
        threads = os.environ.get(THREADS_ENV)
        if threads:
            try:
                cap = max(1, int(threads))
            except ValueError:
                raise ConfigException("{0} must be an integer, got " \
                    "'{1}'".format(THREADS_ENV, threads))
            self._config["threads"] = min(self._config["threads"], cap)
            logging.debug("Threads capped at {0} by {1}".format(
                self._config["threads"], THREADS_ENV
            ))

    def __getitem__(self, key):
        return self._config[key]

    def __getattr__(self, attr):
        if attr.startswith("_"):
            raise AttributeError(attr)
        try:
            return self._config[attr]
        except KeyError:
            raise AttributeError(attr)

    def as_dict(self):
        return dict(self._config)

def load_config(path=None):
    """
    Defaults when no path is given, otherwise the YAML file at `path`.
    """
    if path is None:
        return Config()
    return Config.from_path(path)
