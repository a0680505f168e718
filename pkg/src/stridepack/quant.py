"""Symmetric per-tensor quantization (zero point fixed at 0).

Rounding is half-to-even throughout. With 1-bit fields the representable
set is {-1, 0}: anything below ``-scale/2`` maps to -1, everything else to 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .packing import BitWidth, SubByteTensor


@dataclass(frozen=True)
class QuantParams:
    scale: float
    bits: BitWidth

    def __post_init__(self):
        try:
            scale = float(self.scale)
        except (TypeError, ValueError):
            raise DomainError(f"scale must be a number, got {self.scale!r}") from None
        if not (np.isfinite(scale) and scale > 0):
            raise DomainError(f"scale must be positive and finite, got {scale}")
        object.__setattr__(self, "bits", BitWidth.parse(self.bits))
        object.__setattr__(self, "scale", scale)

    def dequantize(self, q) -> np.ndarray:
        values = q.values if isinstance(q, SubByteTensor) else np.asarray(q)
        return values.astype(np.float64) * self.scale


def _as_2d(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    return arr.reshape(1, -1) if arr.ndim <= 1 else arr


def _clamp_round(x: np.ndarray, bits: BitWidth) -> np.ndarray:
    return np.clip(np.rint(x), bits.min_value, bits.max_value).astype(np.int8)


def quantize(x, q: QuantParams) -> SubByteTensor:
    arr = _as_2d(x)
    if not np.isfinite(arr).all():
        raise DomainError("cannot quantize non-finite values")
    return SubByteTensor(q.bits, _clamp_round(arr / q.scale, q.bits))


def choose_scale(x, bits: int | BitWidth) -> QuantParams:
    """Scale mapping ``max|x|`` onto ``2**(bits-1)``; an all-zero tensor gets 1.0."""
    bw = BitWidth.parse(bits)
    arr = np.asarray(x, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot choose a scale for an empty tensor")
    peak = float(np.max(np.abs(arr)))
    if peak == 0.0:
        return QuantParams(1.0, bw)
    return QuantParams(peak / (1 << (int(bw) - 1)), bw)


def requantize(
    acc,
    w: QuantParams,
    a: QuantParams,
    out_bits: int | BitWidth,
    out_scale: float | None = None,
) -> SubByteTensor:
    """Scale int32 accumulators back to a narrow integer type.

    If ``out_scale`` is omitted it is chosen from the dequantized accumulator.
    """
    out_bw = BitWidth.parse(out_bits)
    real = np.asarray(acc, dtype=np.float64) * (w.scale * a.scale)
    if out_scale is None:
        out_scale = choose_scale(real, out_bw).scale if real.size else 1.0
    return SubByteTensor(out_bw, _clamp_round(_as_2d(real) / out_scale, out_bw))
