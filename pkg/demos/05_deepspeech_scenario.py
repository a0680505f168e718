"""A speech model's layer mix: packed kernel on the recurrent part only."""

from __future__ import annotations

import sys
from pathlib import Path

from stridepack import KernelId, bench

cfg = Path(__file__).with_name("deepspeech.cfg")
scenario = bench.parse_scenario(cfg.read_text())
print(bench.format_scenario(scenario))

# %% batched FC layers stay on the int8 baseline; the unrolled LSTM steps
# are single-vector products and take the packed kernel
for name in ("w4a8", "w2a8", "w1a1"):
    report = bench.run_scenario(scenario, KernelId.parse(name))
    total = report.rows[-1]
    print(f"{name}: end to end {total.median_ns / 1e6:.1f} ms vs {total.baseline_ns / 1e6:.1f} ms, "
          f"speedup {total.speedup:.2f}, weights {total.packed_weight_bytes / 2**20:.1f} MiB "
          f"of {total.plain_weight_bytes / 2**20:.1f}")

bench.emit_csv(report, sys.stdout)
