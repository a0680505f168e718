"""Reference, emulated-vector and compiled GEMV on the same problems."""

from __future__ import annotations

import time

import numpy as np

from stridepack import (
    FULLPACK_PAIRS,
    KernelId,
    gemv_naive_w4a8,
    gemv_ref,
    gemv_vec,
    gemv_vec_dispatch,
    hw_available,
    pack_naive_w4,
    random_problem,
)
from stridepack.kernels_ref import Variant
from stridepack.simd import VectorUnit

rng = np.random.default_rng(1)

# %% every packed pair agrees with the unpack-then-multiply reference
for w, a in FULLPACK_PAIRS:
    p = random_problem(rng, w, a, 8, 1000)
    ref = gemv_ref(KernelId(w, a, Variant.FULLPACK_REF), p)
    emu = gemv_vec(KernelId(w, a), p)
    hw = gemv_vec_dispatch(w, a, True, p)
    print(f"W{w}A{a}: emulated {np.array_equal(emu, ref)}, dispatched {np.array_equal(hw, ref)}")

# %% the adjacent-pair layout gives the same numbers with a different byte order
p = random_problem(rng, 4, 8, 8, 1000)
naive = gemv_naive_w4a8(pack_naive_w4(p.weight_values()), p.activation_values())
print("naive W4A8 agrees:", np.array_equal(naive, gemv_ref(KernelId(4, 8, "fullpack_ref"), p)))

# %% register traffic for one block: packed side loads once, plain side once per group
for pair in ((4, 8), (2, 8), (1, 8), (4, 4)):
    block = 16 * (8 // min(pair))
    unit = VectorUnit(counting=True)
    gemv_vec(KernelId(*pair), random_problem(rng, *pair, 1, block), unit)
    print(f"W{pair[0]}A{pair[1]} loads per block:", dict(unit.loads))

# %% a rough timing on this machine
if hw_available():
    p = random_problem(rng, 4, 8, 2048, 2048)
    base = random_problem(rng, 8, 8, 2048, 2048)
    for name, fn in (("w4a8", lambda: gemv_vec_dispatch(4, 8, True, p)),
                     ("w8a8", lambda: gemv_vec_dispatch(8, 8, True, base))):
        fn()
        t0 = time.perf_counter()
        for _ in range(5):
            fn()
        print(f"{name} 2048x2048: {(time.perf_counter() - t0) / 5 * 1e3:.2f} ms")
