"""Stride-16 sub-byte layout.

A row is cut into 16-byte blocks. With ``bits`` per element each byte holds
``lanes = 8 // bits`` fields, and a block covers ``16 * lanes`` columns.
Inside block ``i`` of a row, byte ``b`` carries in bit field
``[s*bits, (s+1)*bits)`` the element at column ``i*block_elems + 16*s + b``.

So a single 16-byte load followed by a pair of per-lane shifts yields 16
column-consecutive signed values for each stride group ``s``. Fields are
two's-complement; columns past the logical width are zero padding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import CorruptLayoutError, UnsupportedWidthError, ValueRangeError

VECTOR_BYTES = 16


class BitWidth(enum.IntEnum):
    B1 = 1
    B2 = 2
    B4 = 4
    B8 = 8

    @classmethod
    def parse(cls, value: int | "BitWidth") -> "BitWidth":
        try:
            return cls(int(value))
        except ValueError:
            raise UnsupportedWidthError(f"bit width must be one of 1, 2, 4, 8; got {value}") from None

    @property
    def lanes_per_byte(self) -> int:
        return 8 // self.value

    @property
    def block_elems(self) -> int:
        return VECTOR_BYTES * self.lanes_per_byte

    @property
    def min_value(self) -> int:
        return -(1 << (self.value - 1))

    @property
    def max_value(self) -> int:
        return (1 << (self.value - 1)) - 1

    @property
    def is_sub_byte(self) -> bool:
        return self.value < 8


def padded_length(cols: int, bits: int | BitWidth) -> int:
    """Smallest multiple of the block width that is >= ``cols``."""
    be = BitWidth.parse(bits).block_elems
    return -(-cols // be) * be


def packed_nbytes(rows: int, cols: int, bits: int | BitWidth) -> int:
    """Exact footprint in bytes of a ``rows x cols`` matrix in this layout.

    For 8-bit data this is the plain ``rows * cols``.
    """
    bw = BitWidth.parse(bits)
    if not bw.is_sub_byte:
        return rows * cols
    return rows * (padded_length(cols, bw) // bw.block_elems) * VECTOR_BYTES


def _check_range(values: np.ndarray, bits: BitWidth) -> None:
    bad = (values < bits.min_value) | (values > bits.max_value)
    if bad.any():
        r, c = (int(i) for i in np.argwhere(bad)[0])
        raise ValueRangeError(r, c, int(values[r, c]), int(bits))


@dataclass(frozen=True, eq=False)
class SubByteTensor:
    """Unpacked signed values, one byte each, all within the range of ``bits``."""

    bits: BitWidth
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", BitWidth.parse(self.bits))
        v = np.asarray(self.values)
        if v.ndim == 1:
            v = v.reshape(1, -1)
        if v.ndim != 2:
            raise ValueError(f"values must be 1-D or 2-D, got shape {v.shape}")
        if v.dtype != np.int8:
            if v.size and (v.min() < -128 or v.max() > 127):
                r, c = (int(i) for i in np.argwhere((v < -128) | (v > 127))[0])
                raise ValueRangeError(r, c, int(v[r, c]), int(self.bits))
            v = v.astype(np.int8)
        _check_range(v, self.bits)
        object.__setattr__(self, "values", v)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, SubByteTensor):
            return NotImplemented
        return self.bits == other.bits and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class PackedMatrix:
    bits: BitWidth
    rows: int
    cols: int
    data: np.ndarray  # flat uint8

    def __post_init__(self):
        bw = BitWidth.parse(self.bits)
        if not bw.is_sub_byte:
            raise UnsupportedWidthError("8-bit matrices are stored plain, not packed")
        object.__setattr__(self, "bits", bw)
        data = np.ascontiguousarray(np.asarray(self.data, dtype=np.uint8).reshape(-1))
        expected = packed_nbytes(self.rows, self.cols, bw)
        if data.size != expected:
            raise CorruptLayoutError(
                f"{self.rows}x{self.cols} at {int(bw)} bits needs {expected} bytes, got {data.size}"
            )
        object.__setattr__(self, "data", data)

    @property
    def padded_cols(self) -> int:
        return padded_length(self.cols, self.bits)

    @property
    def n_blocks(self) -> int:
        return self.padded_cols // self.bits.block_elems

    @property
    def nbytes(self) -> int:
        return self.data.size

    def blocks(self) -> np.ndarray:
        """View of the data as ``(rows, n_blocks, 16)`` uint8."""
        return self.data.reshape(self.rows, self.n_blocks, VECTOR_BYTES)

    def __eq__(self, other):
        if not isinstance(other, PackedMatrix):
            return NotImplemented
        return (
            self.bits == other.bits
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.data, other.data)
        )


def shift_amounts(s: int, bits: int | BitWidth) -> tuple[int, int]:
    """(left, right) per-lane shift counts that isolate and sign-extend group ``s``."""
    bw = BitWidth.parse(bits)
    if not 0 <= s < bw.lanes_per_byte:
        raise IndexError(f"group {s} out of range for {int(bw)}-bit fields")
    return 8 - (s + 1) * int(bw), 8 - int(bw)


def extract_group(block: np.ndarray, s: int, bits: int | BitWidth) -> np.ndarray:
    """Sign-extended field ``s`` of every byte, as int8.

    Works on any array whose last axis is byte lanes. The top group needs only
    the arithmetic right shift; the others shift left first to drop the
    higher fields.
    """
    lsl, asr = shift_amounts(s, bits)
    v = np.asarray(block)
    if v.dtype != np.uint8:
        v = v.astype(np.int8).view(np.uint8)
    if lsl:
        v = v << np.uint8(lsl)
    return v.view(np.int8) >> np.int8(asr)


def pack(t: SubByteTensor) -> PackedMatrix:
    bits = t.bits
    if not bits.is_sub_byte:
        raise UnsupportedWidthError("8-bit tensors are stored plain; nothing to pack")
    _check_range(t.values, bits)
    lanes = bits.lanes_per_byte
    pc = padded_length(t.cols, bits)
    nb = pc // bits.block_elems

    padded = np.zeros((t.rows, pc), dtype=np.int8)
    padded[:, : t.cols] = t.values
    mask = np.uint8((1 << int(bits)) - 1)
    fields = padded.view(np.uint8).reshape(t.rows, nb, lanes, VECTOR_BYTES) & mask

    out = np.zeros((t.rows, nb, VECTOR_BYTES), dtype=np.uint8)
    for s in range(lanes):
        out |= fields[:, :, s, :] << np.uint8(s * int(bits))
    return PackedMatrix(bits, t.rows, t.cols, out.reshape(-1))


def unpack(p: PackedMatrix) -> SubByteTensor:
    if p.data.size != packed_nbytes(p.rows, p.cols, p.bits):
        raise CorruptLayoutError("packed data length does not match its shape")
    lanes = p.bits.lanes_per_byte
    blocks = p.blocks()
    groups = np.empty((p.rows, p.n_blocks, lanes, VECTOR_BYTES), dtype=np.int8)
    for s in range(lanes):
        groups[:, :, s, :] = extract_group(blocks, s, p.bits)
    values = groups.reshape(p.rows, p.padded_cols)[:, : p.cols]
    return SubByteTensor(p.bits, np.ascontiguousarray(values))


def locate(col: int, bits: int | BitWidth) -> tuple[int, int, int]:
    """Map a logical column to its (block, byte, group) position."""
    bw = BitWidth.parse(bits)
    block, within = divmod(col, bw.block_elems)
    group, byte = divmod(within, VECTOR_BYTES)
    return block, byte, group


def column_of(block: int, byte: int, group: int, bits: int | BitWidth) -> int:
    """Inverse of :func:`locate`."""
    return block * BitWidth.parse(bits).block_elems + group * VECTOR_BYTES + byte
