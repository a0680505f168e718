"""Brute-force ground truth for tests.

Plain Python ints and lists only. Nothing here may import from the rest of
the package: these functions exist to catch bugs the production code shares
with itself.
"""


def oracle_extract(byte, s, bits):
    """Signed value of bit field [s*bits, (s+1)*bits) of ``byte``."""
    field = (byte >> (s * bits)) & ((1 << bits) - 1)
    if field >= 1 << (bits - 1):
        field -= 1 << bits
    return field


def oracle_pack(rows, bits):
    """Pack a list of rows of ints into the stride-16 layout, bit by bit."""
    per_byte = 8 // bits
    block = 16 * per_byte
    out = bytearray()
    for row in rows:
        ncols = len(row)
        nblocks = (ncols + block - 1) // block
        for i in range(nblocks):
            for b in range(16):
                byte = 0
                for s in range(per_byte):
                    col = i * block + s * 16 + b
                    value = row[col] if col < ncols else 0
                    field = value & ((1 << bits) - 1)
                    byte |= field << (s * bits)
                out.append(byte)
    return bytes(out)


def oracle_unpack(data, bits, nrows, ncols):
    per_byte = 8 // bits
    block = 16 * per_byte
    nblocks = (ncols + block - 1) // block
    rows = []
    for r in range(nrows):
        row = []
        for col in range(ncols):
            i = col // block
            s = (col % block) // 16
            b = col % 16
            byte = data[(r * nblocks + i) * 16 + b]
            row.append(oracle_extract(byte, s, bits))
        rows.append(row)
    return rows


def oracle_gemv(W, A):
    out = []
    for row in W:
        total = 0
        for j in range(len(A)):
            total += int(row[j]) * int(A[j])
        out.append(total)
    return out
