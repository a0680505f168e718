"""Vector GEMV kernels over the stride-16 layout.

Every kernel walks one packed 16-byte block at a time. For a packed operand
with ``L = 8 // bits`` stride groups, one block load is split into ``L``
registers of 16 column-consecutive values (the top group with a single
arithmetic shift right, the rest with shift-left then shift-right). Each
group register meets a 16-byte slice of the other operand:

* packed weights, 8-bit activations: slice at column ``i*block + 16*s``;
* 8-bit weights, packed activations: the same, roles swapped;
* both packed at equal width: group ``s`` of weights with group ``s`` of
  activations, which cover identical columns.

Rows are processed together (one register per row) which leaves per-lane
semantics untouched. The native path in :mod:`stridepack._native` is
bit-identical and is preferred when numba is importable.
"""

from __future__ import annotations

import numpy as np

from . import simd
from .errors import ShapeError, UnsupportedKernelError
from .kernels_ref import GemvProblem, KernelId, Variant, check_pair
from .packing import BitWidth, PackedMatrix, shift_amounts
from .simd import LANES, VectorUnit


def _extract(v: np.ndarray, s: int, bits: BitWidth, unit: VectorUnit, operand: str) -> np.ndarray:
    left, right = shift_amounts(s, bits)
    unit.note_derived(operand)
    return simd.asr(simd.lsl(v, left), right)


def _operand(x, rows: int | None, width: int, cols: int, name: str) -> np.ndarray:
    """2-D (weights) or 1-D (activations) byte view of one operand."""
    if isinstance(x, PackedMatrix):
        data = x.data
        return data.reshape(rows, -1) if rows is not None else data
    arr = np.asarray(x)
    if arr.dtype != np.int8:
        raise ShapeError(f"plain {name} must be int8, got {arr.dtype}")
    if arr.shape[-1] != width:
        raise ShapeError(f"plain {name} must be zero-padded to {width} columns, got {arr.shape[-1]}")
    if np.any(arr[..., cols:]):
        raise ShapeError(f"plain {name} has non-zero padding past column {cols}")
    return arr


def _check(kid: KernelId, p: GemvProblem) -> tuple[int, int]:
    if kid.variant is Variant.NAIVE:
        raise UnsupportedKernelError("the naive kernel is not a vector kernel")
    pair = check_pair(kid.weight_bits, kid.act_bits)
    if pair != (int(p.weight_bits), int(p.act_bits)):
        raise ShapeError(f"{kid.name} does not match operands W{int(p.weight_bits)}A{int(p.act_bits)}")
    return pair


def gemv_vec(kid: KernelId, p: GemvProblem, unit: VectorUnit | None = None) -> np.ndarray:
    """Emulated vector GEMV; exact int32 output of length ``p.rows``."""
    wbits, abits = _check(kid, p)
    unit = unit or VectorUnit()
    width = p.padded_cols
    W = _operand(p.weights, p.rows, width, p.cols, "weights")
    A = _operand(p.activations, None, width, p.cols, "activations")
    acc = simd.zero_acc(p.rows)

    if wbits == 8 and abits == 8:
        for j in range(0, width, LANES):
            simd.dot_acc(acc, unit.load(W, j, "weights"), unit.load(A, j, "activations"))
        return simd.hsum(acc)

    if wbits < 8 and abits < 8:
        bits = BitWidth(wbits)
        for i in range(width // bits.block_elems):
            vw = unit.load(W, i * LANES, "weights")
            va = unit.load(A, i * LANES, "activations")
            for s in reversed(range(bits.lanes_per_byte)):
                simd.dot_acc(
                    acc,
                    _extract(vw, s, bits, unit, "weights"),
                    _extract(va, s, bits, unit, "activations"),
                )
        return simd.hsum(acc)

    if wbits < 8:
        packed, plain, pname, qname, bits = W, A, "weights", "activations", BitWidth(wbits)
    else:
        packed, plain, pname, qname, bits = A, W, "activations", "weights", BitWidth(abits)
    block = bits.block_elems
    for i in range(width // block):
        v = unit.load(packed, i * LANES, pname)
        # top group first: it needs no left shift, so the loaded register
        # can be reused in place for the lower groups
        for s in reversed(range(bits.lanes_per_byte)):
            g = _extract(v, s, bits, unit, pname)
            simd.dot_acc(acc, g, unit.load(plain, i * block + s * LANES, qname))
    return simd.hsum(acc)


def hw_available() -> bool:
    from . import _native

    return _native.AVAILABLE


def gemv_native(kid: KernelId, p: GemvProblem) -> np.ndarray:
    from . import _native

    wbits, abits = _check(kid, p)
    width = p.padded_cols
    W = _operand(p.weights, p.rows, width, p.cols, "weights")
    A = _operand(p.activations, None, width, p.cols, "activations")
    return _native.gemv(W, A, wbits, abits)


def gemv_vec_dispatch(weight_bits, act_bits, prefer_hw: bool, p: GemvProblem) -> np.ndarray:
    """Run the vector kernel for a pair, natively compiled when possible."""
    w, a = check_pair(weight_bits, act_bits)
    variant = Variant.BASELINE_W8A8 if (w, a) == (8, 8) else Variant.FULLPACK_VEC
    kid = KernelId(w, a, variant)
    if prefer_hw and hw_available():
        return gemv_native(kid, p)
    return gemv_vec(kid, p)
