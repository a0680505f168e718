import subprocess
import sys

import numpy as np
import pytest

from stridepack import _native, bench, cli, kernels_vec
from stridepack.cli import EXIT_CONFIG, EXIT_OK, EXIT_VERIFY, main


def test_verify_all_ok(capsys):
    assert main(["verify", "--trials", "5"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 9
    assert all(line.endswith("ok (5/5)") for line in out)


def test_verify_reports_corruption(monkeypatch, capsys):
    real = kernels_vec.gemv_vec

    def broken(kid, p, unit=None):
        out = real(kid, p, unit).copy()
        out[-1] ^= 1
        return out

    monkeypatch.setattr(cli, "gemv_vec", broken)
    assert main(["verify", "--kernels", "w1a1", "--trials", "3"]) == EXIT_VERIFY
    assert "FAIL (0/3)" in capsys.readouterr().out


@pytest.mark.parametrize("kernels", ["w4a8", "w8a2", "w2a2", "naive_w4a8"])
def test_sweep_exits_2_on_mutation(monkeypatch, tmp_path, kernels):
    def corrupt(fn):
        def wrapper(*args):
            out = np.array(fn(*args), copy=True)
            out[0] += 7
            return out

        return wrapper

    monkeypatch.setattr(bench, "gemv_vec_dispatch", corrupt(bench.gemv_vec_dispatch))
    monkeypatch.setattr(bench, "gemv_naive_w4a8", corrupt(bench.gemv_naive_w4a8))
    monkeypatch.setattr(_native, "naive_w4a8", corrupt(_native.naive_w4a8))
    out = tmp_path / "r.csv"
    code = main(["sweep", "--kernels", kernels, "--sizes", "8x64", "--iters", "1", "--csv", str(out)])
    assert code == EXIT_VERIFY
    assert not out.exists() or "w" not in out.read_text()


def test_sweep_csv(tmp_path):
    out = tmp_path / "r.csv"
    code = main(["sweep", "--kernels", "bits2", "--sizes", "8x64,16x200", "--iters", "1", "--csv", str(out)])
    assert code == EXIT_OK
    report = bench.read_csv(out.read_text())
    assert [(r.kernel, r.rows, r.cols) for r in report.rows] == [
        (k, r, c) for k in ("w2a8", "w8a2", "w2a2") for r, c in ((8, 64), (16, 200))
    ]


def test_bad_arguments_exit_3(tmp_path, capsys):
    assert main(["sweep", "--kernels", "w4a2"]) == EXIT_CONFIG
    assert main(["sweep", "--sizes", "oops"]) == EXIT_CONFIG
    assert main(["scenario", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("layer x kind=conv rows=1 cols=1\n")
    assert main(["scenario", "--config", str(cfg)]) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_scenario_from_file(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("iters=1\nwarmup=0\nlayer a rows=32 cols=64\nlayer b rows=8 cols=16 batch=2\n")
    assert main(["scenario", "--config", str(cfg), "--kernel", "w1a1", "--portable"]) == EXIT_OK
    report = bench.read_csv(capsys.readouterr().out)
    assert [r.kernel for r in report.rows] == ["a/w1a1", "b/w8a8", "total/w1a1"]


def test_pack_unpack_round_trip(tmp_path, rng):
    values = rng.integers(-2, 2, size=(5, 77), dtype=np.int8)
    raw, packed, back = tmp_path / "v.bin", tmp_path / "v.fpk", tmp_path / "w.bin"
    raw.write_bytes(values.tobytes())
    args = ["pack", "--in", str(raw), "--bits", "2", "--rows", "5", "--cols", "77", "--out", str(packed)]
    assert main(args) == EXIT_OK
    assert packed.stat().st_size == 24 + 5 * 16 * 2
    assert main(["unpack", "--in", str(packed), "--out", str(back)]) == EXIT_OK
    assert back.read_bytes() == raw.read_bytes()


def test_pack_rejects_bad_input(tmp_path):
    raw = tmp_path / "v.bin"
    raw.write_bytes(bytes([0, 1, 2, 9]))
    base = ["pack", "--in", str(raw), "--rows", "2", "--cols", "2", "--out", str(tmp_path / "o")]
    assert main(base + ["--bits", "4"]) == EXIT_CONFIG  # 9 does not fit in 4 bits
    assert main(base + ["--bits", "3"]) == EXIT_CONFIG
    assert main(["pack", "--in", str(raw), "--bits", "4", "--rows", "3", "--cols", "2", "--out", "x"]) == EXIT_CONFIG
    junk = tmp_path / "junk"
    junk.write_bytes(b"NOPE" + bytes(30))
    assert main(["unpack", "--in", str(junk), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "stridepack", "verify", "--kernels", "w4a4", "--trials", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "w4a4: ok (2/2)"
