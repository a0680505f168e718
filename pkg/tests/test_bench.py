import io

import numpy as np
import pytest

from stridepack import ConfigError, KernelId, VerificationError, bench
from stridepack.bench import (
    CSV_FIELDS,
    LayerScenario,
    LayerSpec,
    SweepConfig,
    emit_csv,
    parse_kernels,
    parse_scenario,
    parse_sizes,
    read_csv,
    run_scenario,
    run_sweep,
)


def _non_timing(rows):
    return [(r.kernel, r.rows, r.cols, r.packed_weight_bytes, r.plain_weight_bytes) for r in rows]


def test_small_sweep_every_kernel():
    cfg = SweepConfig(parse_kernels("all"), [(128, 128)], iters=1, warmup=0)
    report = run_sweep(cfg)
    assert [r.kernel for r in report.rows] == [k.name for k in cfg.kernels]
    assert len(report.rows) == 9
    assert all(r.speedup > 0 and r.median_ns > 0 for r in report.rows)
    assert len(report.verified) == 9


def test_w4_footprint_at_2048():
    report = run_sweep(SweepConfig([KernelId(4, 8)], [(2048, 2048)], iters=1, warmup=0))
    row = report.rows[0]
    assert row.packed_weight_bytes == 2_097_152
    assert row.plain_weight_bytes == 2 * row.packed_weight_bytes


def test_footprint_formula():
    assert bench.weight_footprint(KernelId(1, 8), 3, 129) == 3 * 2 * 16
    assert bench.weight_footprint(KernelId(8, 1), 3, 129) == 3 * 129
    assert bench.weight_footprint(KernelId.parse("naive_w4a8"), 3, 5) == 9


def test_default_grid():
    grid = bench.default_grid()
    assert len(grid) == 49
    assert grid[0] == (128, 128) and grid[-1] == (8192, 8192)
    assert parse_sizes("128:8192:x2") == grid


def test_parse_sizes_and_kernels():
    assert parse_sizes("3x5, 7x9") == [(3, 5), (7, 9)]
    for bad in ("12", "1:2", "4:2:x2", "1:8:+2", "axb"):
        with pytest.raises(ConfigError):
            parse_sizes(bad)
    names = [k.name for k in parse_kernels("weights,w4a8,bits1")]
    assert names == ["w4a8", "w2a8", "w1a8", "w8a1", "w1a1"]
    assert [k.name for k in parse_kernels("naive_w4a8,w8a8")] == ["naive_w4a8", "w8a8"]


def test_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig([KernelId(4, 8)], [(4, 4)], iters=0)
    with pytest.raises(ConfigError):
        SweepConfig([KernelId(4, 8)], [(4, 70000)])
    with pytest.raises(ConfigError):
        SweepConfig([], [(4, 4)])
    with pytest.raises(ConfigError):
        parse_kernels(" , ")


def test_csv_round_trip():
    report = run_sweep(SweepConfig(parse_kernels("w4a8,w1a1"), [(16, 256)], iters=1, warmup=0))
    buf = io.StringIO()
    emit_csv(report, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == ",".join(CSV_FIELDS)
    assert len([ln for ln in lines if not ln.startswith("#")]) == 3
    back = read_csv(buf.getvalue())
    assert back.rows == report.rows


def test_csv_header_only():
    buf = io.StringIO()
    emit_csv(bench.BenchReport(), buf, note=None)
    assert buf.getvalue() == ",".join(CSV_FIELDS) + "\n"
    with pytest.raises(ConfigError):
        read_csv("a,b\n1,2\n")


def test_non_timing_columns_are_deterministic():
    cfg = SweepConfig(parse_kernels("both"), [(8, 300), (33, 64)], iters=1, warmup=0, seed=3)
    assert _non_timing(run_sweep(cfg).rows) == _non_timing(run_sweep(cfg).rows)


def test_verification_failure_is_raised(monkeypatch):
    real = bench.gemv_vec_dispatch

    def broken(*args):
        out = real(*args).copy()
        out[0] += 1
        return out

    monkeypatch.setattr(bench, "gemv_vec_dispatch", broken)
    with pytest.raises(VerificationError) as info:
        run_sweep(SweepConfig([KernelId(2, 2)], [(4, 64)], iters=1, warmup=0))
    assert "w2a2" in str(info.value)


def _small_scenario(**kw):
    layers = [
        LayerSpec("a", "fc", 64, 100, batch=4),
        LayerSpec("b", "lstm_unrolled", 128, 256, repeat=3),
        LayerSpec("c", "fc", 16, 64),
    ]
    return LayerScenario(layers, iters=1, warmup=0, **kw)


def test_scenario_rows():
    report = run_scenario(_small_scenario(), KernelId(4, 8))
    assert [r.kernel for r in report.rows] == ["a/w8a8", "b/w4a8", "c/w4a8", "total/w4a8"]
    total = report.rows[-1]
    assert (total.rows, total.cols) == (0, 0)
    assert total.packed_weight_bytes == sum(r.packed_weight_bytes for r in report.rows[:-1])
    assert total.plain_weight_bytes == 64 * 100 + 128 * 256 + 16 * 64


def test_deepspeech_layout():
    s = bench.deepspeech_scenario()
    assert len(s.layers) == 6
    assert [l.uses_gemv for l in s.layers] == [False, False, False, True, False, False]
    assert parse_scenario(bench.format_scenario(s)).layers == s.layers


def test_scenario_gemv_layer_matches_sweep():
    s = LayerScenario([LayerSpec("only", "fc", 96, 200)], iters=1, warmup=0)
    layer_row = run_scenario(s, KernelId(2, 8)).rows[0]
    sweep_row = run_sweep(SweepConfig([KernelId(2, 8)], [(96, 200)], iters=1, warmup=0)).rows[0]
    assert layer_row.packed_weight_bytes == sweep_row.packed_weight_bytes
    assert layer_row.plain_weight_bytes == sweep_row.plain_weight_bytes


def test_all_baseline_total_close_to_sum():
    layers = [LayerSpec(n, "fc", 512, 512, batch=8) for n in "xyz"]
    s = LayerScenario(layers, iters=5, warmup=1)
    report = run_scenario(s, KernelId(4, 8))
    parts = sum(r.median_ns for r in report.rows[:-1])
    total = report.rows[-1].median_ns
    assert abs(total - parts) / parts < 0.25


@pytest.mark.parametrize(
    "text",
    [
        "layer",
        "layer x rows=3",
        "layer x kind=conv rows=2 cols=2",
        "layer x rows=2 cols=2 colour=red",
        "layer x kind=lstm_unrolled rows=2 cols=2 batch=4",
        "iters=0\nlayer x rows=2 cols=2",
        "speed=fast\nlayer x rows=2 cols=2",
        "name=empty",
        "layer x rows=two cols=2",
    ],
)
def test_scenario_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_scenario(text)


def test_scenario_parse_ok():
    s = parse_scenario("# c\nname=t\niters=2\nlayer l1 rows=4 cols=8 batch=2  # inline\n")
    assert s.name == "t" and s.iters == 2
    assert s.layers == [LayerSpec("l1", "fc", 4, 8, batch=2)]


def test_median_ns():
    calls = []
    assert bench.median_ns(lambda: calls.append(1), iters=3, warmup=2) >= 0
    assert len(calls) == 5
    assert bench.speedup(300, 100) == 3.0
    assert bench.speedup(1, 3) == 0.333333
