"""Scalar reference kernels and the problem/kernel descriptors they share.

Everything here is exact integer arithmetic with 32-bit results. These
functions are the ground truth the vector kernels are checked against.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, UnsupportedKernelError
from .packing import (
    VECTOR_BYTES,
    BitWidth,
    PackedMatrix,
    SubByteTensor,
    pack,
    unpack,
)

# The nine weight/activation pairs the packed kernels cover.
FULLPACK_PAIRS = (
    (8, 4), (4, 8), (4, 4),
    (2, 8), (8, 2), (2, 2),
    (1, 8), (8, 1), (1, 1),
)

# Accumulator safety: |product| <= 2**14, so k <= 2**16 keeps |sum| <= 2**30.
MAX_COLS = 65536


class Variant(str, enum.Enum):
    BASELINE_W8A8 = "baseline_w8a8"
    NAIVE = "naive"
    FULLPACK_REF = "fullpack_ref"
    FULLPACK_VEC = "fullpack_vec"


@dataclass(frozen=True)
class KernelId:
    weight_bits: BitWidth
    act_bits: BitWidth
    variant: Variant = Variant.FULLPACK_VEC

    def __post_init__(self):
        object.__setattr__(self, "weight_bits", BitWidth.parse(self.weight_bits))
        object.__setattr__(self, "act_bits", BitWidth.parse(self.act_bits))
        object.__setattr__(self, "variant", Variant(self.variant))
        pair = (int(self.weight_bits), int(self.act_bits))
        if self.variant is Variant.BASELINE_W8A8:
            ok = pair == (8, 8)
        elif self.variant is Variant.NAIVE:
            ok = pair == (4, 8)
        else:
            ok = pair in FULLPACK_PAIRS
        if not ok:
            raise UnsupportedKernelError(f"no {self.variant.value} kernel for W{pair[0]}A{pair[1]}")

    @property
    def pair(self) -> tuple[int, int]:
        return int(self.weight_bits), int(self.act_bits)

    @property
    def name(self) -> str:
        w, a = self.pair
        if self.variant is Variant.NAIVE:
            return f"naive_w{w}a{a}"
        return f"w{w}a{a}"

    @classmethod
    def parse(cls, text: str, variant: Variant | str = Variant.FULLPACK_VEC) -> "KernelId":
        """Parse ``w4a8``, ``w8a8`` (the baseline) or ``naive_w4a8``."""
        t = text.strip().lower()
        if t.startswith("naive_"):
            variant, t = Variant.NAIVE, t[len("naive_"):]
        try:
            w_str, a_str = t[1:].split("a")
            if t[0] != "w":
                raise ValueError
            w, a = int(w_str), int(a_str)
        except ValueError:
            raise UnsupportedKernelError(f"cannot parse kernel name {text!r}") from None
        if (w, a) == (8, 8):
            variant = Variant.BASELINE_W8A8
        return cls(w, a, variant)

    def with_variant(self, variant: Variant | str) -> "KernelId":
        return KernelId(self.weight_bits, self.act_bits, variant)


def check_pair(weight_bits, act_bits) -> tuple[int, int]:
    pair = (int(weight_bits), int(act_bits))
    if pair != (8, 8) and pair not in FULLPACK_PAIRS:
        raise UnsupportedKernelError(f"unsupported combination W{pair[0]}A{pair[1]}")
    return pair


@dataclass(frozen=True, eq=False)
class GemvProblem:
    """Operands of one GEMV in the storage form the kernels consume.

    Sub-byte operands are :class:`PackedMatrix` (activations as one row).
    8-bit operands are int8 arrays whose trailing dimension is zero-padded to
    ``padded_cols`` so every kernel can walk whole 16-byte slices.
    """

    weights: PackedMatrix | np.ndarray
    activations: PackedMatrix | np.ndarray
    rows: int
    cols: int

    def __post_init__(self):
        if self.cols > MAX_COLS:
            raise ShapeError(f"cols={self.cols} exceeds the accumulator bound {MAX_COLS}")
        w, a = self.weights, self.activations
        if isinstance(w, PackedMatrix):
            if (w.rows, w.cols) != (self.rows, self.cols):
                raise ShapeError(f"weights are {w.rows}x{w.cols}, problem is {self.rows}x{self.cols}")
        elif w.ndim != 2 or w.shape[0] != self.rows or w.shape[1] < self.cols:
            raise ShapeError(f"weight array shape {w.shape} does not fit {self.rows}x{self.cols}")
        if isinstance(a, PackedMatrix):
            if (a.rows, a.cols) != (1, self.cols):
                raise ShapeError(f"activations are {a.rows}x{a.cols}, expected 1x{self.cols}")
        elif a.ndim != 1 or a.shape[0] < self.cols:
            raise ShapeError(f"activation array shape {a.shape} does not fit k={self.cols}")

    @property
    def weight_bits(self) -> BitWidth:
        w = self.weights
        return w.bits if isinstance(w, PackedMatrix) else BitWidth.B8

    @property
    def act_bits(self) -> BitWidth:
        a = self.activations
        return a.bits if isinstance(a, PackedMatrix) else BitWidth.B8

    @property
    def padded_cols(self) -> int:
        """Column count every operand is laid out to."""
        return _padded_cols(self.cols, self.weight_bits, self.act_bits)

    def weight_values(self) -> np.ndarray:
        w = self.weights
        if isinstance(w, PackedMatrix):
            return unpack(w).values
        return w[:, : self.cols]

    def activation_values(self) -> np.ndarray:
        a = self.activations
        if isinstance(a, PackedMatrix):
            return unpack(a).values[0]
        return a[: self.cols]


def _padded_cols(cols: int, weight_bits, act_bits) -> int:
    widths = [BitWidth.parse(weight_bits), BitWidth.parse(act_bits)]
    unit = max(b.block_elems if b.is_sub_byte else VECTOR_BYTES for b in widths)
    return -(-cols // unit) * unit


def _plain(values: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros(values.shape[:-1] + (width,), dtype=np.int8)
    out[..., : values.shape[-1]] = values
    return out


def make_problem(weights, activations, weight_bits=8, act_bits=8) -> GemvProblem:
    """Pack/pad logical int8 operands into a :class:`GemvProblem`."""
    wt = SubByteTensor(weight_bits, weights)
    at = SubByteTensor(act_bits, np.asarray(activations).reshape(1, -1))
    if wt.cols != at.cols:
        raise ShapeError(f"weights have {wt.cols} columns but activations have {at.cols}")
    width = _padded_cols(wt.cols, wt.bits, at.bits)
    w = pack(wt) if wt.bits.is_sub_byte else _plain(wt.values, width)
    a = pack(at) if at.bits.is_sub_byte else _plain(at.values[0], width)
    return GemvProblem(w, a, wt.rows, wt.cols)


def random_problem(rng: np.random.Generator, weight_bits, act_bits, rows: int, cols: int) -> GemvProblem:
    wb, ab = BitWidth.parse(weight_bits), BitWidth.parse(act_bits)
    w = rng.integers(wb.min_value, wb.max_value + 1, size=(rows, cols), dtype=np.int8)
    a = rng.integers(ab.min_value, ab.max_value + 1, size=cols, dtype=np.int8)
    return make_problem(w, a, wb, ab)


def gemv_baseline_w8a8(W, A) -> np.ndarray:
    """Plain int8 x int8 GEMV with int32 results."""
    W = np.asarray(W)
    A = np.asarray(A)
    if W.ndim != 2 or A.ndim != 1 or W.shape[1] != A.shape[0]:
        raise ShapeError(f"cannot multiply {W.shape} by {A.shape}")
    if W.shape[1] > MAX_COLS:
        raise ShapeError(f"k={W.shape[1]} exceeds the accumulator bound {MAX_COLS}")
    a = A.astype(np.int64)
    out = np.empty(W.shape[0], dtype=np.int32)
    step = max(1, (1 << 22) // max(1, W.shape[1]))  # bound the int64 temporary
    for r in range(0, W.shape[0], step):
        out[r : r + step] = W[r : r + step].astype(np.int64) @ a
    return out


# -- the naive adjacent-pair layout ------------------------------------------

def pack_naive_w4(values, pad: bool = False) -> np.ndarray:
    """Two adjacent columns per byte: even column low nibble, odd column high."""
    t = SubByteTensor(4, values)
    v = t.values
    if t.cols % 2:
        if not pad:
            raise ShapeError(f"naive 4-bit packing needs an even column count, got {t.cols}")
        v = np.concatenate([v, np.zeros((t.rows, 1), dtype=np.int8)], axis=1)
    u = v.view(np.uint8)
    return ((u[:, 0::2] & 0x0F) | (u[:, 1::2] << 4)).astype(np.uint8)


def gemv_naive_w4a8(W: np.ndarray, A) -> np.ndarray:
    """Byte-serial GEMV over naive-packed 4-bit weights and 8-bit activations.

    Each weight byte yields two values through shifts (left-then-arithmetic
    right for the low nibble, arithmetic right for the high one) that are
    multiplied into the running sum with two consecutive activations.
    """
    W = np.asarray(W, dtype=np.uint8)
    A = np.asarray(A, dtype=np.int8)
    if W.ndim != 2:
        raise ShapeError(f"naive weights must be 2-D bytes, got shape {W.shape}")
    if A.ndim != 1 or A.shape[0] != 2 * W.shape[1]:
        raise ShapeError(f"{W.shape[1]} weight bytes per row need {2 * W.shape[1]} activations, got {A.shape}")
    if A.shape[0] > MAX_COLS:
        raise ShapeError(f"k={A.shape[0]} exceeds the accumulator bound {MAX_COLS}")
    w0 = (W << np.uint8(4)).view(np.int8) >> np.int8(4)
    w1 = W.view(np.int8) >> np.int8(4)
    a0 = A[0::2].astype(np.int32)
    a1 = A[1::2].astype(np.int32)
    out = np.zeros(W.shape[0], dtype=np.int32)
    for j in range(W.shape[1]):
        out += w0[:, j].astype(np.int32) * a0[j]
        out += w1[:, j].astype(np.int32) * a1[j]
    return out


def gemv_ref(kid: KernelId, p: GemvProblem) -> np.ndarray:
    """Unpack both operands, then run the plain integer GEMV."""
    check_pair(kid.weight_bits, kid.act_bits)
    if kid.variant is Variant.NAIVE:
        raise UnsupportedKernelError("the naive kernel has its own entry point")
    if (kid.weight_bits, kid.act_bits) != (p.weight_bits, p.act_bits):
        raise ShapeError(
            f"{kid.name} does not match operands W{int(p.weight_bits)}A{int(p.act_bits)}"
        )
    return gemv_baseline_w8a8(p.weight_values(), p.activation_values())
