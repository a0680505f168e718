"""Binary container for packed matrices.

Layout (little-endian)::

    offset  size  field
    0       4     magic b"FPK1"
    4       1     bits (1, 2 or 4)
    5       8     rows, u64
    13      8     cols (logical), u64
    21      3     reserved, zero
    24      ...   packed payload, rows * n_blocks * 16 bytes
"""

from __future__ import annotations

import struct
from typing import BinaryIO

import numpy as np

from .errors import BadMagicError, PackedFormatError, TruncatedPayloadError, UnsupportedWidthError
from .packing import PackedMatrix, packed_nbytes

MAGIC = b"FPK1"
HEADER = struct.Struct("<4sBQQ3s")
HEADER_SIZE = HEADER.size  # 24

_PACKABLE = (1, 2, 4)


def encode_header(bits: int, rows: int, cols: int) -> bytes:
    return HEADER.pack(MAGIC, int(bits), rows, cols, b"\x00\x00\x00")


def decode_header(raw: bytes) -> tuple[int, int, int]:
    if len(raw) < HEADER_SIZE:
        if raw[: len(MAGIC)] != MAGIC[: len(raw)]:
            raise BadMagicError(f"bad magic {raw[:4]!r}")
        raise TruncatedPayloadError(f"header needs {HEADER_SIZE} bytes, got {len(raw)}")
    magic, bits, rows, cols, reserved = HEADER.unpack(raw[:HEADER_SIZE])
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}")
    if bits not in _PACKABLE:
        raise UnsupportedWidthError(f"unsupported bits value {bits} in header")
    if reserved != b"\x00\x00\x00":
        raise PackedFormatError("reserved header bytes must be zero")
    return bits, rows, cols


def to_bytes(p: PackedMatrix) -> bytes:
    return encode_header(p.bits, p.rows, p.cols) + p.data.tobytes()


def from_bytes(raw: bytes) -> PackedMatrix:
    bits, rows, cols = decode_header(raw)
    need = packed_nbytes(rows, cols, bits)
    payload = raw[HEADER_SIZE:]
    if len(payload) < need:
        raise TruncatedPayloadError(f"payload needs {need} bytes, got {len(payload)}")
    if len(payload) > need:
        raise PackedFormatError(f"{len(payload) - need} trailing bytes after payload")
    return PackedMatrix(bits, rows, cols, np.frombuffer(payload, dtype=np.uint8).copy())


def write_packed(p: PackedMatrix, sink: BinaryIO) -> None:
    sink.write(encode_header(p.bits, p.rows, p.cols))
    sink.write(p.data.tobytes())


def read_packed(source: BinaryIO) -> PackedMatrix:
    """Read one matrix from ``source``; the stream is left after its payload."""
    head = source.read(HEADER_SIZE)
    bits, rows, cols = decode_header(head)
    need = packed_nbytes(rows, cols, bits)
    payload = source.read(need)
    if len(payload) != need:
        raise TruncatedPayloadError(f"payload needs {need} bytes, got {len(payload)}")
    return PackedMatrix(bits, rows, cols, np.frombuffer(payload, dtype=np.uint8).copy())
