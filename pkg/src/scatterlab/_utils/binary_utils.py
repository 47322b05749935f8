#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Flat little-endian complex arrays behind a fixed 32-byte header.

Layout: magic ``SCLF``, format version (u32), points per axis (u32), box side
(f64), time stamp (f64), 4 bytes of padding, then float64 (re, im) pairs in
row-major order.
"""

import struct
from typing import NamedTuple

import numpy as np

from scatterlab.exception import FieldFormatError

MAGIC = b"SCLF"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIIdd4x")
PAYLOAD_DTYPE = np.dtype("<c16")

assert HEADER.size == 32


class BinaryHeader(NamedTuple):
    n_points: int
    side: float
    time: float
    version: int = FORMAT_VERSION


def encode(values: np.ndarray, n_points: int, side: float, time: float) -> bytes:
    payload = np.ascontiguousarray(values, dtype=PAYLOAD_DTYPE).tobytes(order="C")
    return HEADER.pack(MAGIC, FORMAT_VERSION, n_points, side, time) + payload


def decode(data: bytes) -> tuple[BinaryHeader, np.ndarray]:
    """Split ``data`` into its header and a flat complex128 array."""
    if len(data) < HEADER.size:
        raise FieldFormatError(f"Payload too short for header ({len(data)} bytes)")
    magic, version, n_points, side, time = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FieldFormatError(f"Bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise FieldFormatError(f"Unsupported format version {version}")
    body = data[HEADER.size :]
    if len(body) % PAYLOAD_DTYPE.itemsize:
        raise FieldFormatError("Payload length is not a whole number of complex values")
    values = np.frombuffer(body, dtype=PAYLOAD_DTYPE).astype(complex)
    return BinaryHeader(n_points=n_points, side=side, time=time, version=version), values


def shape_for(header: BinaryHeader, count: int, ranks: tuple[int, ...]) -> tuple[int, ...]:
    """Pick the array shape whose element count matches, trying each rank in ``ranks``."""
    n = header.n_points
    for rank in ranks:
        if n**rank == count:
            return (n,) * rank
    raise FieldFormatError(
        f"{count} values do not match n_points={n} for any of the ranks {list(ranks)}"
    )
