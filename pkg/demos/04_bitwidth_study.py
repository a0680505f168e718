"""Footprint and time as the bit width drops, with the baseline alongside."""

from __future__ import annotations

import sys

from stridepack import bench

# %% a small sweep; the CSV is the same one the command line writes
cfg = bench.SweepConfig(
    kernels=bench.parse_kernels("bits4,bits2,bits1"),
    sizes=[(1024, 1024), (4096, 1024)],
    iters=3,
    warmup=1,
)
report = bench.run_sweep(cfg)
bench.emit_csv(report, sys.stdout)

# %% weight bytes only depend on the weight width
print()
for row in report.rows:
    if row.rows == 1024:
        share = row.packed_weight_bytes / row.plain_weight_bytes
        print(f"{row.kernel:5s} weights at {share:.3f} of int8, speedup {row.speedup:.2f}")
