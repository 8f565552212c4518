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

from fractions import Fraction
from itertools import combinations

import numpy as np

__version__ = "0.1"

MASK64 = (1 << 64) - 1

def pairs(n):
    """Every unordered vertex pair (v1, v2) with v1 < v2, in order"""
    return combinations(range(n), 2)

def threshold(eps, n):
    """
    The exact value of eps * n. Floats are read with their decimal meaning
    so that 0.3 * 10 is 3 and not 3.0000000000000004.
    :param eps: float or Fraction.
    :param n: vertex count.
    """
    if not isinstance(eps, Fraction):
        eps = Fraction(repr(float(eps)))
    return eps * n

def rng(seed, *keys):
    """
    Seeded numpy generator for the stream named by `keys` under the master
    `seed`. Streams with different keys are independent of each other, so
    results never depend on the order work is done in.
    :param seed: 64-bit integer master seed.
    :param keys: non-negative integers naming the stream.
    """
    return np.random.default_rng([seed & MASK64] + [int(k) for k in keys])

def format_distance(x):
    """
    Distances as printed by the command line: integers without a
    fraction, `inf` for unreachable pairs.
    """
    x = float(x)
    if x == float("inf"):
        return "inf"
    if x.is_integer():
        return str(int(x))
    return repr(x)

class SpanOracleException(Exception):
    pass
