"""A fixed 128-bit byte-vector unit emulated with numpy.

A "vector" is any int8 array whose last axis has 16 lanes; leading axes batch
independent registers (one per matrix row, say) without changing per-lane
semantics. Accumulators are int32 arrays with a last axis of 4 lanes, each
lane summing the products of 4 adjacent byte lanes (the shape of a signed
byte dot-product instruction).

Loads go through :class:`VectorUnit` so tests can count 16-byte transfers.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

LANES = 16
ACC_LANES = 4


def lsl(v: np.ndarray, n: int) -> np.ndarray:
    """Per-lane logical shift left; bits shifted past lane 7 are dropped."""
    if n == 0:
        return v
    return (v.view(np.uint8) << np.uint8(n)).view(np.int8)


def asr(v: np.ndarray, n: int) -> np.ndarray:
    """Per-lane arithmetic shift right (sign-filling)."""
    return v.view(np.int8) >> np.int8(n)


def dot_acc(acc: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """acc += widen(a) * widen(b), folding lanes 4:1 into 32-bit accumulators.

    Products are formed at 16 bits (|a*b| <= 2**14 always fits) and added to
    the accumulator immediately.
    """
    prod = a.astype(np.int16) * b.astype(np.int16)
    folded = prod.reshape(prod.shape[:-1] + (ACC_LANES, LANES // ACC_LANES))
    acc += folded.sum(axis=-1, dtype=np.int32)
    return acc


def zero_acc(batch: int) -> np.ndarray:
    return np.zeros((batch, ACC_LANES), dtype=np.int32)


def hsum(acc: np.ndarray) -> np.ndarray:
    return acc.sum(axis=-1, dtype=np.int32)


class VectorUnit:
    """Issues 16-byte loads, optionally tallying them by operand name."""

    def __init__(self, counting: bool = False):
        self.counting = counting
        self.loads: Counter[str] = Counter()
        self.derived: Counter[str] = Counter()

    def load(self, buf: np.ndarray, start: int, operand: str) -> np.ndarray:
        """Load lanes ``[start, start+16)`` of the last axis of ``buf``.

        A 2-D ``buf`` yields one register per row.
        """
        v = buf[..., start : start + LANES]
        if self.counting:
            self.loads[operand] += v.size // LANES
        return v.view(np.int8)

    def note_derived(self, operand: str, n: int = 1) -> None:
        if self.counting:
            self.derived[operand] += n

    def reset(self) -> None:
        self.loads.clear()
        self.derived.clear()
