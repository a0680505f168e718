"""Size sweeps and layer-mix scenarios with CSV reporting.

Every timed configuration is checked against the reference GEMV first; a
mismatch raises :class:`VerificationError` and nothing is reported for it.
Timings are medians of ``iters`` runs after ``warmup`` runs, single threaded.
Footprint columns are computed from the layout formula, never measured.
"""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, TextIO

import numpy as np

from .errors import ConfigError, VerificationError
from .kernels_ref import (
    FULLPACK_PAIRS,
    MAX_COLS,
    GemvProblem,
    KernelId,
    Variant,
    gemv_baseline_w8a8,
    gemv_naive_w4a8,
    gemv_ref,
    make_problem,
    pack_naive_w4,
)
from .kernels_vec import gemv_vec_dispatch, hw_available
from .packing import packed_nbytes

CSV_FIELDS = (
    "kernel",
    "rows",
    "cols",
    "median_ns",
    "baseline_ns",
    "speedup",
    "packed_weight_bytes",
    "plain_weight_bytes",
)

BASELINE_NOTE = (
    "baseline is the local vectorized W8A8 GEMV of this package; "
    "speedups are indicative for this host only"
)

BASELINE = KernelId(8, 8, Variant.BASELINE_W8A8)

KERNEL_GROUPS = {
    "all": FULLPACK_PAIRS,
    "weights": ((4, 8), (2, 8), (1, 8)),
    "activations": ((8, 4), (8, 2), (8, 1)),
    "both": ((4, 4), (2, 2), (1, 1)),
    "bits4": ((4, 8), (8, 4), (4, 4)),
    "bits2": ((2, 8), (8, 2), (2, 2)),
    "bits1": ((1, 8), (8, 1), (1, 1)),
}

GRID_AXIS = (128, 8192, 2)


def parse_kernels(text: str) -> list[KernelId]:
    """Comma list of kernel names and/or group names (``all``, ``weights``...)."""
    out: list[KernelId] = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        if tok in KERNEL_GROUPS:
            out.extend(KernelId(w, a) for w, a in KERNEL_GROUPS[tok])
        else:
            out.append(KernelId.parse(tok))
    if not out:
        raise ConfigError("no kernels selected")
    seen: dict[str, KernelId] = {}
    for k in out:
        seen.setdefault(k.name, k)
    return list(seen.values())


def geometric_axis(start: int, stop: int, factor: int) -> list[int]:
    if start < 1 or stop < start or factor < 2:
        raise ConfigError(f"bad axis {start}:{stop}:x{factor}")
    axis, v = [], start
    while v <= stop:
        axis.append(v)
        v *= factor
    return axis


def parse_sizes(text: str) -> list[tuple[int, int]]:
    """``start:stop:xF`` (square grid over a geometric axis) or ``RxC,RxC,...``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = text.split(":")
            if not step.startswith("x"):
                raise ValueError
            axis = geometric_axis(int(start), int(stop), int(step[1:]))
            return [(r, c) for r in axis for c in axis]
        sizes = []
        for tok in text.split(","):
            r, c = tok.lower().split("x")
            sizes.append((int(r), int(c)))
        return sizes
    except ValueError:
        raise ConfigError(f"cannot parse sizes {text!r}") from None


def default_grid() -> list[tuple[int, int]]:
    axis = geometric_axis(*GRID_AXIS)
    return [(r, c) for r in axis for c in axis]


@dataclass
class SweepConfig:
    kernels: list[KernelId]
    sizes: list[tuple[int, int]]
    iters: int = 5
    warmup: int = 1
    seed: int = 0
    prefer_hw: bool = True

    def __post_init__(self):
        if self.iters < 1:
            raise ConfigError("iters must be >= 1")
        if self.warmup < 0:
            raise ConfigError("warmup must be >= 0")
        if not self.sizes:
            raise ConfigError("no sizes given")
        if not self.kernels:
            raise ConfigError("no kernels given")
        for r, c in self.sizes:
            if r < 1 or c < 1 or c > MAX_COLS:
                raise ConfigError(f"size {r}x{c} outside 1..{MAX_COLS} columns")


@dataclass
class BenchRow:
    kernel: str
    rows: int
    cols: int
    median_ns: int
    baseline_ns: int
    speedup: float
    packed_weight_bytes: int
    plain_weight_bytes: int


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    # (kernel, rows, cols) of every configuration that passed verification
    verified: list[tuple[str, int, int]] = field(default_factory=list)

    def by_kernel(self, name: str) -> list[BenchRow]:
        return [r for r in self.rows if r.kernel == name]


def speedup(baseline_ns: int, median_ns: int) -> float:
    return round(baseline_ns / max(median_ns, 1), 6)


def weight_footprint(kid: KernelId, rows: int, cols: int) -> int:
    if kid.variant is Variant.NAIVE:
        return rows * -(-cols // 2)
    return packed_nbytes(rows, cols, kid.weight_bits)


def median_ns(fn: Callable[[], object], iters: int, warmup: int) -> int:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(iters):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    return int(statistics.median(samples))


@dataclass
class Case:
    """One kernel bound to its operands, plus the answer it must produce."""

    kernel: KernelId
    rows: int
    cols: int
    run: Callable[[], np.ndarray]
    expected: np.ndarray


def _operands(kid: KernelId, rows: int, cols: int, seed: int):
    rng = np.random.default_rng([seed, int(kid.weight_bits), int(kid.act_bits), rows, cols])
    wb, ab = kid.weight_bits, kid.act_bits
    w = rng.integers(wb.min_value, wb.max_value + 1, size=(rows, cols), dtype=np.int8)
    a = rng.integers(ab.min_value, ab.max_value + 1, size=cols, dtype=np.int8)
    return w, a


def build_case(kid: KernelId, rows: int, cols: int, seed: int, prefer_hw: bool = True) -> Case:
    w, a = _operands(kid, rows, cols, seed)
    if kid.variant is Variant.NAIVE:
        packed = pack_naive_w4(w, pad=True)
        a_even = np.zeros(packed.shape[1] * 2, dtype=np.int8)
        a_even[:cols] = a
        expected = gemv_baseline_w8a8(w, a)
        if prefer_hw and hw_available():
            from . import _native

            return Case(kid, rows, cols, lambda: _native.naive_w4a8(packed, a_even), expected)
        return Case(kid, rows, cols, lambda: gemv_naive_w4a8(packed, a_even), expected)

    p: GemvProblem = make_problem(w, a, kid.weight_bits, kid.act_bits)
    ref_id = kid if kid.variant is Variant.BASELINE_W8A8 else kid.with_variant(Variant.FULLPACK_REF)
    expected = gemv_ref(ref_id, p)
    wb, ab = kid.pair
    return Case(kid, rows, cols, lambda: gemv_vec_dispatch(wb, ab, prefer_hw, p), expected)


def verify_case(case: Case) -> None:
    got = case.run()
    if got.shape != case.expected.shape or not np.array_equal(got, case.expected):
        bad = int(np.count_nonzero(got != case.expected)) if got.shape == case.expected.shape else -1
        raise VerificationError(case.kernel.name, case.rows, case.cols, f"{bad} mismatching outputs")


def run_sweep(cfg: SweepConfig) -> BenchReport:
    report = BenchReport()
    baseline_cache: dict[tuple[int, int], int] = {}

    def baseline_time(r: int, c: int) -> int:
        if (r, c) not in baseline_cache:
            case = build_case(BASELINE, r, c, cfg.seed, cfg.prefer_hw)
            verify_case(case)
            baseline_cache[(r, c)] = median_ns(case.run, cfg.iters, cfg.warmup)
        return baseline_cache[(r, c)]

    for kid in cfg.kernels:
        for r, c in cfg.sizes:
            case = build_case(kid, r, c, cfg.seed, cfg.prefer_hw)
            verify_case(case)
            report.verified.append((kid.name, r, c))
            t = median_ns(case.run, cfg.iters, cfg.warmup)
            del case
            b = t if kid == BASELINE else baseline_time(r, c)
            report.rows.append(
                BenchRow(kid.name, r, c, t, b, speedup(b, t), weight_footprint(kid, r, c), r * c)
            )
    return report


# -- layer scenarios -----------------------------------------------------------

LAYER_KINDS = ("fc", "lstm_unrolled")


@dataclass
class LayerSpec:
    name: str
    kind: str
    rows: int
    cols: int
    batch: int = 1
    repeat: int = 1

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ConfigError(f"layer {self.name}: kind must be one of {LAYER_KINDS}")
        if min(self.rows, self.cols, self.batch, self.repeat) < 1:
            raise ConfigError(f"layer {self.name}: sizes, batch and repeat must be >= 1")
        if self.cols > MAX_COLS:
            raise ConfigError(f"layer {self.name}: cols {self.cols} exceeds {MAX_COLS}")
        if self.kind == "lstm_unrolled" and self.batch != 1:
            raise ConfigError(f"layer {self.name}: unrolled LSTM steps are single-batch")

    @property
    def uses_gemv(self) -> bool:
        return self.batch == 1


@dataclass
class LayerScenario:
    layers: list[LayerSpec]
    name: str = "scenario"
    iters: int = 3
    warmup: int = 1
    seed: int = 0
    prefer_hw: bool = True

    def __post_init__(self):
        if not self.layers:
            raise ConfigError("scenario has no layers")
        if self.iters < 1 or self.warmup < 0:
            raise ConfigError("iters must be >= 1 and warmup >= 0")


def deepspeech_scenario(**kw) -> LayerScenario:
    """Three batch-16 FC layers, an LSTM unrolled into 16 single-batch gate
    GEMVs (hidden 2048: 4*2048 gate rows over input+hidden columns), two more
    FC layers.
    """
    layers = [
        LayerSpec("fc1", "fc", 2048, 494, batch=16),
        LayerSpec("fc2", "fc", 2048, 2048, batch=16),
        LayerSpec("fc3", "fc", 2048, 2048, batch=16),
        LayerSpec("lstm", "lstm_unrolled", 8192, 4096, batch=1, repeat=16),
        LayerSpec("fc5", "fc", 2048, 2048, batch=16),
        LayerSpec("fc6", "fc", 29, 2048, batch=16),
    ]
    return LayerScenario(layers, name="deepspeech", **kw)


def parse_scenario(text: str) -> LayerScenario:
    """Parse ``key=value`` settings and ``layer NAME key=value...`` lines."""
    settings: dict[str, str] = {}
    layers: list[LayerSpec] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("layer ") or line == "layer":
                parts = line.split()
                if len(parts) < 2 or "=" in parts[1]:
                    raise ValueError("layer needs a name")
                kv = dict(p.split("=", 1) for p in parts[2:])
                unknown = set(kv) - {"kind", "rows", "cols", "batch", "repeat"}
                if unknown:
                    raise ValueError(f"unknown layer keys {sorted(unknown)}")
                layers.append(
                    LayerSpec(
                        parts[1],
                        kv.get("kind", "fc"),
                        int(kv["rows"]),
                        int(kv["cols"]),
                        int(kv.get("batch", 1)),
                        int(kv.get("repeat", 1)),
                    )
                )
            else:
                key, value = (s.strip() for s in line.split("=", 1))
                if key not in {"name", "iters", "warmup", "seed", "prefer_hw"}:
                    raise ValueError(f"unknown setting {key!r}")
                settings[key] = value
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"line {lineno}: cannot parse {raw.strip()!r} ({exc})") from None
    try:
        return LayerScenario(
            layers,
            name=settings.get("name", "scenario"),
            iters=int(settings.get("iters", 3)),
            warmup=int(settings.get("warmup", 1)),
            seed=int(settings.get("seed", 0)),
            prefer_hw=settings.get("prefer_hw", "1").lower() in {"1", "true", "yes"},
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def format_scenario(s: LayerScenario) -> str:
    lines = [f"name={s.name}", f"iters={s.iters}", f"warmup={s.warmup}", f"seed={s.seed}"]
    for l in s.layers:
        lines.append(
            f"layer {l.name} kind={l.kind} rows={l.rows} cols={l.cols} batch={l.batch} repeat={l.repeat}"
        )
    return "\n".join(lines) + "\n"


def _layer_runner(case: Case, calls: int) -> Callable[[], None]:
    def run():
        for _ in range(calls):
            case.run()

    return run


def run_scenario(s: LayerScenario, kernel: KernelId) -> BenchReport:
    """Time each layer and the whole pipeline.

    The chosen kernel runs only on single-batch layers; batched layers use the
    baseline, issued as ``batch`` GEMVs. A layer row's time covers all of its
    ``batch * repeat`` GEMVs. The trailing ``total`` row times the pipeline
    end to end.
    """
    report = BenchReport()
    chosen, base_runs = [], []
    for i, layer in enumerate(s.layers):
        kid = kernel if layer.uses_gemv else BASELINE
        seed = s.seed + i
        case = build_case(kid, layer.rows, layer.cols, seed, s.prefer_hw)
        verify_case(case)
        report.verified.append((kid.name, layer.rows, layer.cols))
        if kid == BASELINE:
            base = case
        else:
            base = build_case(BASELINE, layer.rows, layer.cols, seed, s.prefer_hw)
            verify_case(base)
        calls = layer.batch * layer.repeat
        chosen.append((layer, kid, _layer_runner(case, calls)))
        base_runs.append(_layer_runner(base, calls))

    total_packed = total_plain = 0
    for (layer, kid, run), brun in zip(chosen, base_runs):
        t = median_ns(run, s.iters, s.warmup)
        b = t if kid == BASELINE else median_ns(brun, s.iters, s.warmup)
        packed = weight_footprint(kid, layer.rows, layer.cols)
        plain = layer.rows * layer.cols
        total_packed += packed
        total_plain += plain
        report.rows.append(
            BenchRow(f"{layer.name}/{kid.name}", layer.rows, layer.cols, t, b, speedup(b, t), packed, plain)
        )

    def pipeline(runs):
        def run():
            for r in runs:
                r()

        return run

    t = median_ns(pipeline([r for _, _, r in chosen]), s.iters, s.warmup)
    if all(kid == BASELINE for _, kid, _ in chosen):
        b = t
    else:
        b = median_ns(pipeline(base_runs), s.iters, s.warmup)
    report.rows.append(
        BenchRow(f"total/{kernel.name}", 0, 0, t, b, speedup(b, t), total_packed, total_plain)
    )
    return report


# -- CSV -----------------------------------------------------------------------

def emit_csv(r: BenchReport, sink: TextIO, note: str | None = BASELINE_NOTE) -> None:
    """Write ``r`` as CSV, preceded by a ``#`` comment line when ``note`` is set."""
    if note:
        sink.write(f"# {note}\n")
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in r.rows:
        writer.writerow(
            [
                row.kernel,
                row.rows,
                row.cols,
                row.median_ns,
                row.baseline_ns,
                f"{row.speedup:.6f}",
                row.packed_weight_bytes,
                row.plain_weight_bytes,
            ]
        )


def read_csv(source: TextIO | str) -> BenchReport:
    if isinstance(source, str):
        source = io.StringIO(source)
    lines: Iterable[str] = (ln for ln in source if not ln.startswith("#"))
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ConfigError(f"unexpected CSV header {reader.fieldnames}")
    out = BenchReport()
    for rec in reader:
        out.rows.append(
            BenchRow(
                rec["kernel"],
                int(rec["rows"]),
                int(rec["cols"]),
                int(rec["median_ns"]),
                int(rec["baseline_ns"]),
                float(rec["speedup"]),
                int(rec["packed_weight_bytes"]),
                int(rec["plain_weight_bytes"]),
            )
        )
    return out
