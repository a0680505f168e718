"""Compiled GEMV kernels (numba), bit-identical to the emulated path.

Kernels are specialized per bit width so that shift counts and group counts
are compile-time constants. Each packed weight byte is read once and yields
all of its stride groups. Activations are row-invariant, so once per call
they are reordered (or, when packed, extracted) into ``(byte, group)`` order
to keep the per-row loop a single contiguous reduction LLVM can vectorize.
Sums are exact in int32 under the column bound checked by the caller.

``AVAILABLE`` is False when numba cannot be imported.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - depends on the host
    numba = None

AVAILABLE = numba is not None

_cache: dict = {}


def _make_plain_plain():
    @numba.njit(cache=False)
    def kernel(W, A, out):
        z, width = W.shape
        for r in range(z):
            total = np.int32(0)
            for j in range(width):
                total = np.int32(total + np.int32(W[r, j]) * np.int32(A[j]))
            out[r] = total

    return kernel


def _make_packed_weights(bits: int, packed_acts: bool):
    lanes = 8 // bits
    block = 16 * lanes

    # a byte goes to the top of an int32: the left shift drops the higher
    # fields and the arithmetic right shift sign-extends the wanted one.
    # Activations are put in (byte, group) order first; packed ones are
    # decoded with the same shift pair. Kept inline: a helper call here
    # stops LLVM from vectorizing the row loop.
    @numba.njit(cache=False)
    def kernel(W, A, out):
        z, nbytes = W.shape
        asr = np.int32(32 - bits)
        Ag = np.empty((nbytes, lanes), dtype=np.int32)
        for i in range(nbytes // 16):
            for s in range(lanes):
                for b in range(16):
                    if packed_acts:
                        x = np.int32(np.int8(A[16 * i + b]))
                        Ag[16 * i + b, s] = np.int32(np.int32(x << np.int32(32 - (s + 1) * bits)) >> asr)
                    else:
                        Ag[16 * i + b, s] = A[i * block + 16 * s + b]
        Wi = W.view(np.int8)
        for r in range(z):
            total = np.int32(0)
            for j in range(nbytes):
                x = np.int32(Wi[r, j])
                for s in range(lanes):
                    w = np.int32(np.int32(x << np.int32(32 - (s + 1) * bits)) >> asr)
                    total = np.int32(total + np.int32(w * Ag[j, s]))
            out[r] = total

    return kernel


def _make_plain_packed(bits: int):
    lanes = 8 // bits
    block = 16 * lanes
    asr = np.int32(32 - bits)

    @numba.njit(cache=False)
    def kernel(W, A, out):
        z, width = W.shape
        # activations are shared by every row: decode them once
        acts = np.empty(width, dtype=np.int8)
        for i in range(A.shape[0] // 16):
            for s in range(lanes):
                for b in range(16):
                    x = np.int32(np.int8(A[16 * i + b]))
                    acts[i * block + 16 * s + b] = np.int8(np.int32(np.int32(x << np.int32(32 - (s + 1) * bits)) >> asr))
        for r in range(z):
            total = np.int32(0)
            for j in range(width):
                total = np.int32(total + np.int32(W[r, j]) * np.int32(acts[j]))
            out[r] = total

    return kernel


def _make_naive_w4a8():
    @numba.njit(cache=False)
    def kernel(W, A, out):
        z, nbytes = W.shape
        Wi = W.view(np.int8)
        for r in range(z):
            total = np.int32(0)
            for j in range(nbytes):
                x = np.int32(Wi[r, j])
                w0 = np.int32(np.int32(x << np.int32(28)) >> np.int32(28))
                w1 = np.int32(x >> np.int32(4))
                total = np.int32(total + w0 * np.int32(A[2 * j]) + w1 * np.int32(A[2 * j + 1]))
            out[r] = total

    return kernel


def kernel_for(wbits: int, abits: int):
    key = (wbits, abits)
    if key not in _cache:
        if not AVAILABLE:
            raise RuntimeError("numba is not available")
        if key == (8, 8):
            _cache[key] = _make_plain_plain()
        elif abits == 8:
            _cache[key] = _make_packed_weights(wbits, False)
        elif wbits == 8:
            _cache[key] = _make_plain_packed(abits)
        else:
            _cache[key] = _make_packed_weights(wbits, True)
    return _cache[key]


def gemv(W: np.ndarray, A: np.ndarray, wbits: int, abits: int) -> np.ndarray:
    out = np.empty(W.shape[0], dtype=np.int32)
    kernel_for(wbits, abits)(W, A, out)
    return out


def naive_w4a8(W: np.ndarray, A: np.ndarray) -> np.ndarray:
    if "naive" not in _cache:
        if not AVAILABLE:
            raise RuntimeError("numba is not available")
        _cache["naive"] = _make_naive_w4a8()
    out = np.empty(W.shape[0], dtype=np.int32)
    _cache["naive"](W, A, out)
    return out
