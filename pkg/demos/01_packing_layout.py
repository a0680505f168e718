"""Where every value lands in the stride-16 packed layout."""

from __future__ import annotations

import numpy as np

from stridepack import SubByteTensor, extract_group, pack, unpack
from stridepack.packing import column_of, locate

# %% a ramp of 4-bit values over one 32-column block
row = np.array([(c % 16) - 8 for c in range(32)], dtype=np.int8)
packed = pack(SubByteTensor(4, row))
print("values :", row.tolist())
print("bytes  :", packed.data.tobytes().hex(" "))

# byte b holds column b in its low nibble and column 16 + b in its high one,
# so one 16-byte load brings in two full vectors of weights
for col in (0, 5, 16, 21):
    block, byte, group = locate(col, 4)
    print(f"col {col:2d} -> block {block}, byte {byte:2d}, group {group}")
    assert column_of(block, byte, group, 4) == col

# %% getting a group back is a left shift then an arithmetic right shift
block = packed.blocks()[0, 0].view(np.int8)
for s in range(2):
    print(f"group {s}:", extract_group(block, s, 4).tolist())

# %% same idea at 2 and 1 bits: 4 and 8 groups per byte
rng = np.random.default_rng(0)
for bits, lo, hi in ((2, -2, 2), (1, -1, 1)):
    t = SubByteTensor(bits, rng.integers(lo, hi, size=(3, 200), dtype=np.int8))
    p = pack(t)
    print(f"{bits}-bit 3x200: {p.nbytes} bytes packed, {3 * 200} plain, "
          f"{p.padded_cols - 200} zero padding columns per row")
    assert unpack(p) == t
