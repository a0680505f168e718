"""Quantize weights, activations or both, and see what each costs in accuracy."""

from __future__ import annotations

import numpy as np

from stridepack import choose_scale, gemv_vec_dispatch, make_problem, quantize

rng = np.random.default_rng(2)
W = rng.normal(0, 0.05, size=(256, 512))
x = np.maximum(rng.normal(0, 1.0, size=512), 0)  # post-ReLU activations
exact = W @ x

def run(wbits: int, abits: int) -> float:
    qw = choose_scale(W, wbits)
    qa = choose_scale(x, abits)
    p = make_problem(quantize(W, qw).values, quantize(x, qa).values[0], wbits, abits)
    acc = gemv_vec_dispatch(wbits, abits, True, p)
    y = acc.astype(np.float64) * qw.scale * qa.scale
    return float(np.linalg.norm(y - exact) / np.linalg.norm(exact))

# %% one target at a time, then both
print("pair   relative error")
for label, pairs in (("weights", ((4, 8), (2, 8), (1, 8))),
                     ("activations", ((8, 4), (8, 2), (8, 1))),
                     ("both", ((4, 4), (2, 2), (1, 1)))):
    print(f"-- {label}")
    for w, a in pairs:
        print(f"W{w}A{a}  {run(w, a):.4f}")
print(f"W8A8  {run(8, 8):.4f}  (baseline)")

# 1-bit fields hold only -1 and 0, so non-negative activations all become 0
# and the A1 rows lose the whole signal
