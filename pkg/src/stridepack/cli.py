"""Command line entry point: ``stridepack {sweep,scenario,verify,pack,unpack}``.

Exit codes: 0 success, 2 verification failure, 3 bad configuration or input.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import bench, oracle
from .errors import ConfigError, StridepackError, VerificationError
from .fileformat import read_packed, write_packed
from .kernels_ref import KernelId, Variant, gemv_ref, random_problem
from .kernels_vec import gemv_native, gemv_vec, hw_available
from .packing import BitWidth, SubByteTensor, pack, unpack

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_CONFIG = 3


@contextmanager
def _text_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _cmd_sweep(args) -> int:
    cfg = bench.SweepConfig(
        kernels=bench.parse_kernels(args.kernels),
        sizes=bench.parse_sizes(args.sizes),
        iters=args.iters,
        warmup=args.warmup,
        seed=args.seed,
        prefer_hw=not args.portable,
    )
    report = bench.run_sweep(cfg)
    with _text_out(args.csv) as fh:
        bench.emit_csv(report, fh)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from None
        scenario = bench.parse_scenario(text)
    else:
        scenario = bench.deepspeech_scenario()
    if args.portable:
        scenario.prefer_hw = False
    report = bench.run_scenario(scenario, KernelId.parse(args.kernel))
    with _text_out(args.csv) as fh:
        bench.emit_csv(report, fh)
    return EXIT_OK


def verify_kernel(kid: KernelId, trials: int, seed: int) -> int:
    """Random problems through every path; returns the number of mismatches."""
    rng = np.random.default_rng([seed, *kid.pair])
    ref_id = kid if kid.variant is Variant.BASELINE_W8A8 else kid.with_variant(Variant.FULLPACK_REF)
    block = max(
        b.block_elems if b.is_sub_byte else 16 for b in (kid.weight_bits, kid.act_bits)
    )
    bad = 0
    for _ in range(trials):
        rows = int(rng.integers(1, 9))
        cols = int(rng.integers(1, 9)) * block - int(rng.integers(0, block))
        p = random_problem(rng, kid.weight_bits, kid.act_bits, rows, cols)
        ref = gemv_ref(ref_id, p)
        truth = oracle.oracle_gemv(p.weight_values().tolist(), p.activation_values().tolist())
        outs = [gemv_vec(kid, p)]
        if hw_available():
            outs.append(gemv_native(kid, p))
        if ref.tolist() != truth or any(not np.array_equal(o, ref) for o in outs):
            bad += 1
    return bad


def _cmd_verify(args) -> int:
    kernels = bench.parse_kernels(args.kernels)
    failed = False
    for kid in kernels:
        bad = verify_kernel(kid, args.trials, args.seed)
        print(f"{kid.name}: {'ok' if bad == 0 else 'FAIL'} ({args.trials - bad}/{args.trials})")
        failed |= bad > 0
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_pack(args) -> int:
    bits = BitWidth.parse(args.bits)
    raw = Path(args.input).read_bytes()
    if len(raw) != args.rows * args.cols:
        raise ConfigError(f"{args.input} has {len(raw)} bytes, expected {args.rows * args.cols}")
    values = np.frombuffer(raw, dtype=np.int8).reshape(args.rows, args.cols)
    packed = pack(SubByteTensor(bits, values))
    with open(args.out, "wb") as fh:
        write_packed(packed, fh)
    return EXIT_OK


def _cmd_unpack(args) -> int:
    with open(args.input, "rb") as fh:
        packed = read_packed(fh)
    Path(args.out).write_bytes(unpack(packed).values.tobytes())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stridepack", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="time kernels over a grid of matrix sizes")
    sp.add_argument("--kernels", default="all")
    sp.add_argument("--sizes", default="128:8192:x2")
    sp.add_argument("--iters", type=int, default=5)
    sp.add_argument("--warmup", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", default="-")
    sp.add_argument("--portable", action="store_true", help="use the numpy emulation only")
    sp.set_defaults(func=_cmd_sweep)

    sc = sub.add_parser("scenario", help="time a layer mix end to end")
    sc.add_argument("--config", help="scenario file; default is the built-in speech model")
    sc.add_argument("--kernel", default="w4a8")
    sc.add_argument("--csv", default="-")
    sc.add_argument("--portable", action="store_true")
    sc.set_defaults(func=_cmd_scenario)

    vp = sub.add_parser("verify", help="check kernels against the oracles")
    vp.add_argument("--kernels", default="all")
    vp.add_argument("--trials", type=int, default=100)
    vp.add_argument("--seed", type=int, default=0)
    vp.set_defaults(func=_cmd_verify)

    pk = sub.add_parser("pack", help="raw int8 row-major file -> packed file")
    pk.add_argument("--in", dest="input", required=True)
    pk.add_argument("--bits", type=int, required=True)
    pk.add_argument("--rows", type=int, required=True)
    pk.add_argument("--cols", type=int, required=True)
    pk.add_argument("--out", required=True)
    pk.set_defaults(func=_cmd_pack)

    up = sub.add_parser("unpack", help="packed file -> raw int8 row-major file")
    up.add_argument("--in", dest="input", required=True)
    up.add_argument("--out", required=True)
    up.set_defaults(func=_cmd_unpack)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (StridepackError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
