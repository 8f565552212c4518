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
Binary oracle files.

    magic "SPOR1" | version u16 | kind u8 | payload length u64 | payload |
    CRC-32 u32 of everything before it

All integers little-endian. Distances are exact rationals: an i64
numerator array followed by a u64 denominator array, denominator 0 for
an unreachable vertex.
"""

from struct import Struct, pack, unpack, error as StructError
from fractions import Fraction
import math
import zlib

import numpy as np

from . import SpanOracleException, MASK64
from .oracles import SimpleOracle, TZOracle, CombinedOracle, exact_table

import logging

class SerializationException(SpanOracleException):
    pass

class BadMagicException(SerializationException):
    pass

class VersionMismatchException(SerializationException):
    pass

class TruncatedException(SerializationException):
    pass

class ChecksumException(SerializationException):
    pass

MAGIC = b"SPOR1"
VERSION = 1
HEADER = Struct("<5sHBQ")
CHECKSUM = Struct("<I")
NO_VERTEX = -1

class EKIND:
    """
    Oracle kind tag.
    """
    SIMPLE = 1
    TZ = 2
    COMBINED = 3

class Writer(object):
    def __init__(self):
        self.parts = []

    def send(self, fmt, *values):
        self.parts.append(pack("<" + fmt, *values))

    def send_array(self, values, dtype):
        self.parts.append(np.asarray(values, dtype=dtype).tobytes())

    def send_distances(self, values):
        numerators, denominators = [], []
        for value in values:
            if value == math.inf:
                numerators.append(1)
                denominators.append(0)
                continue
            value = Fraction(value)
            if not (-2 ** 63 <= value.numerator < 2 ** 63 and
                value.denominator < 2 ** 64):
                raise SerializationException("Distance {0} does not fit " \
                    "64-bit numerator and denominator".format(value))
            numerators.append(value.numerator)
            denominators.append(value.denominator)
        self.send_array(numerators, "<i8")
        self.send_array(denominators, "<u8")

    def send_blob(self, blob):
        self.send("Q", len(blob))
        self.parts.append(blob)

    def getvalue(self):
        return b"".join(self.parts)

class Reader(object):
    def __init__(self, data):
        """
        Cursor over a payload. Running out of bytes is a truncation.
        :param data: bytes to read from.
        """
        self.data = data
        self.offset = 0

    def recv(self, length):
        end = self.offset + length
        if end > len(self.data):
            raise TruncatedException("Needed {0} bytes at offset {1}, only " \
                "{2} left".format(length, self.offset,
                    len(self.data) - self.offset))
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def recv_fmt(self, fmt):
        fmt = "<" + fmt
        try:
            size = Struct(fmt).size
            return unpack(fmt, self.recv(size))
        except StructError as e:
            raise SerializationException("Bad field: {0}".format(e))

    def recv_array(self, count, dtype):
        dtype = np.dtype(dtype)
        return np.frombuffer(self.recv(count * dtype.itemsize), dtype=dtype)

    def recv_distances(self, count):
        numerators = self.recv_array(count, "<i8").tolist()
        denominators = self.recv_array(count, "<u8").tolist()
        values = []
        for numerator, denominator in zip(numerators, denominators):
            if denominator == 0:
                values.append(math.inf)
            elif denominator == 1:
                values.append(numerator)
            else:
                values.append(Fraction(numerator, denominator))
        return values

    def recv_blob(self):
        length, = self.recv_fmt("Q")
        return self.recv(length)

    def finish(self):
        if self.offset != len(self.data):
            raise SerializationException("{0} unexpected trailing " \
                "bytes".format(len(self.data) - self.offset))

def _encode_simple(o, out):
    out.send("dII", o.eps, o.n, len(o.landmarks))
    out.send_array(o.landmarks, "<u4")
    out.send_distances(o.table.ravel().tolist())

def _decode_simple(reader):
    eps, n, count = reader.recv_fmt("dII")
    landmarks = reader.recv_array(count, "<u4").tolist()
    values = reader.recv_distances(count * n)
    rows = [values[i * n:(i + 1) * n] for i in range(count)]
    return SimpleOracle(eps, landmarks, exact_table(rows, n))

def _encode_tz(o, out):
    out.send("IIQ", o.n, o.k, o.seed & MASK64)
    out.send_array(o.levels, "<u2")
    for level in o.pivots:
        out.send_array([NO_VERTEX if p is None else p for p, _ in level],
            "<i4")
        out.send_distances([d for _, d in level])
    for bunch in o.bunches:
        members = sorted(bunch)
        out.send("I", len(members))
        out.send_array(members, "<u4")
        out.send_distances([bunch[w] for w in members])

def _decode_tz(reader):
    n, k, seed = reader.recv_fmt("IIQ")
    levels = reader.recv_array(n, "<u2").tolist()
    pivots = []
    for _ in range(k):
        ids = reader.recv_array(n, "<i4").tolist()
        dists = reader.recv_distances(n)
        pivots.append([(None if p == NO_VERTEX else p, d)
            for p, d in zip(ids, dists)])
    bunches = []
    for _ in range(n):
        count, = reader.recv_fmt("I")
        members = reader.recv_array(count, "<u4").tolist()
        dists = reader.recv_distances(count)
        bunches.append(dict(zip(members, dists)))
    return TZOracle(n, k, levels, pivots, bunches, seed)

def _encode_combined(o, out):
    out.send("dd", o.eps, o.delta)
    tz, landmark = Writer(), Writer()
    _encode_tz(o.tz, tz)
    _encode_simple(o.landmark, landmark)
    out.send_blob(tz.getvalue())
    out.send_blob(landmark.getvalue())

def _decode_combined(reader):
    eps, delta = reader.recv_fmt("dd")
    tz_reader = Reader(reader.recv_blob())
    tz = _decode_tz(tz_reader)
    tz_reader.finish()
    landmark_reader = Reader(reader.recv_blob())
    landmark = _decode_simple(landmark_reader)
    landmark_reader.finish()
    return CombinedOracle(eps, delta, tz, landmark)

CODECS = {
    EKIND.SIMPLE: (SimpleOracle, _encode_simple, _decode_simple),
    EKIND.TZ: (TZOracle, _encode_tz, _decode_tz),
    EKIND.COMBINED: (CombinedOracle, _encode_combined, _decode_combined),
}

def kind_of(oracle):
    for kind, (cls, _, _) in CODECS.items():
        if isinstance(oracle, cls):
            return kind
    raise SerializationException("Not an oracle: {0!r}".format(oracle))

def serialize_oracle(oracle):
    """
    Encode an oracle as bytes.
    :param oracle: SimpleOracle, TZOracle or CombinedOracle.
    """
    kind = kind_of(oracle)
    out = Writer()
    CODECS[kind][1](oracle, out)
    payload = out.getvalue()
    body = HEADER.pack(MAGIC, VERSION, kind, len(payload)) + payload
    return body + CHECKSUM.pack(zlib.crc32(body) & 0xffffffff)

def deserialize_oracle(data):
    """
    Decode bytes written by `serialize_oracle`. Wrong magic, another
    format version, missing bytes and a checksum mismatch each raise
    their own exception.
    :param data: bytes.
    """
    data = bytes(data)
    if len(data) < HEADER.size:
        if MAGIC.startswith(data[:len(MAGIC)]):
            raise TruncatedException("Only {0} bytes, header needs " \
                "{1}".format(len(data), HEADER.size))
        raise BadMagicException("Not an oracle file")
    magic, version, kind, length = HEADER.unpack(data[:HEADER.size])
    if magic != MAGIC:
        raise BadMagicException("Not an oracle file: magic {0!r}".format(
            magic
        ))
    if version != VERSION:
        raise VersionMismatchException("Format version {0}, this build " \
            "reads version {1}".format(version, VERSION))
    expected = HEADER.size + length + CHECKSUM.size
    if len(data) < expected:
        raise TruncatedException("Expected {0} bytes, got {1}".format(
            expected, len(data)
        ))
    if len(data) > expected:
        raise SerializationException("{0} bytes after the checksum".format(
            len(data) - expected
        ))
    body = data[:HEADER.size + length]
    stored, = CHECKSUM.unpack(data[HEADER.size + length:])
    if zlib.crc32(body) & 0xffffffff != stored:
        raise ChecksumException("CRC-32 mismatch")
    if kind not in CODECS:
        raise SerializationException("Unknown oracle kind {0}".format(kind))
    reader = Reader(body[HEADER.size:])
    oracle = CODECS[kind][2](reader)
    reader.finish()
    logging.debug("Decoded oracle kind {0}, {1} bytes".format(kind, len(data)))
    return oracle

def save_oracle(oracle, path):
    with open(path, "wb") as f:
        f.write(serialize_oracle(oracle))

def load_oracle(path):
    with open(path, "rb") as f:
        return deserialize_oracle(f.read())
