"""Binary serialization of lookup tables.

Layout (all little-endian, no padding)::

    offset  size  field
         0     4  magic  b"CPWL"
         4     4  version (uint32) = 1
         8     4  flags   (uint32)
        12     4  count   (uint32) = N + 1
        16     8  a       (float64)
        24     8  b       (float64)
        32     .  values  count x float64 (float32 when FLAG_FLOAT32)
         .     .  knots   count x float64 (float32 when FLAG_FLOAT32), only if FLAG_NONUNIFORM

FORMAT.md in the repository root has a worked hex dump.
"""

import io
import math
import struct

import numpy as np

from .errors import BadMagic, CorruptTable, UnsupportedVersion
from .lut import LutTable

MAGIC = b"CPWL"
VERSION = 1
HEADER = struct.Struct("<4sIIIdd")
HEADER_SIZE = HEADER.size  # 32

FLAG_NONUNIFORM = 1 << 0
FLAG_CLAMP = 1 << 1
# Lossy export for consumers that want single precision.  Never set implicitly.
FLAG_FLOAT32 = 1 << 2
KNOWN_FLAGS = FLAG_NONUNIFORM | FLAG_CLAMP | FLAG_FLOAT32


def _flags(t, float32):
    flags = 0
    if t.kind == "nonuniform":
        flags |= FLAG_NONUNIFORM
    if t.policy == "clamp":
        flags |= FLAG_CLAMP
    if float32:
        flags |= FLAG_FLOAT32
    return flags


def to_bytes(t, float32=False):
    """Serialize ``t``; ``float32=True`` selects the lossy single-precision variant."""
    flags = _flags(t, float32)
    dtype = "<f4" if float32 else "<f8"
    a, b = t.a, t.b
    if float32:
        # Header stays float64, but it must agree with the rounded knots.
        a, b = float(np.float32(a)), float(np.float32(b))
    parts = [HEADER.pack(MAGIC, VERSION, flags, t.values.size, a, b),
             t.values.astype(dtype).tobytes()]
    if t.knots is not None:
        parts.append(t.knots.astype(dtype).tobytes())
    return b"".join(parts)


def write_table(t, sink, float32=False):
    """Write ``t`` to a binary file object or a path; returns the byte count."""
    data = to_bytes(t, float32)
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as fh:
            fh.write(data)
    return len(data)


def from_bytes(data):
    data = bytes(data)
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    if len(data) < HEADER_SIZE:
        raise CorruptTable(f"truncated header: {len(data)} of {HEADER_SIZE} bytes")
    _, version, flags, count, a, b = HEADER.unpack_from(data)
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported table version {version}")
    if flags & ~KNOWN_FLAGS:
        raise CorruptTable(f"unknown flag bits 0x{flags & ~KNOWN_FLAGS:x}")
    if count < 2:
        raise CorruptTable(f"count must be at least 2, got {count}")
    width = 4 if flags & FLAG_FLOAT32 else 8
    arrays = 2 if flags & FLAG_NONUNIFORM else 1
    expected = HEADER_SIZE + width * count * arrays
    if len(data) != expected:
        raise CorruptTable(f"length mismatch: {len(data)} bytes, header implies {expected}")
    dtype = "<f4" if width == 4 else "<f8"
    values = np.frombuffer(data, dtype, count, HEADER_SIZE).astype(float)
    knots = None
    if arrays == 2:
        knots = np.frombuffer(data, dtype, count, HEADER_SIZE + width * count).astype(float)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise CorruptTable(f"invalid domain [{a}, {b}]")
    if not np.all(np.isfinite(values)):
        raise CorruptTable("non-finite table value")
    if knots is not None:
        if not np.all(np.isfinite(knots)):
            raise CorruptTable("non-finite knot")
        if np.any(np.diff(knots) <= 0):
            raise CorruptTable("knots are not strictly increasing")
        if knots[0] != a or knots[-1] != b:
            raise CorruptTable("end knots disagree with the header domain")
    kind = "nonuniform" if arrays == 2 else "uniform"
    policy = "clamp" if flags & FLAG_CLAMP else "strict"
    return LutTable(kind, a, b, values, knots, policy)


def read_table(source):
    """Read a table from bytes, a binary file object or a path."""
    if isinstance(source, (bytes, bytearray, memoryview)):
        return from_bytes(source)
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return from_bytes(source.read())
    with open(source, "rb") as fh:
        return from_bytes(fh.read())
