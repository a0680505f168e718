import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stridepack import (
    BitWidth,
    CorruptLayoutError,
    PackedMatrix,
    SubByteTensor,
    UnsupportedWidthError,
    ValueRangeError,
    extract_group,
    pack,
    packed_nbytes,
    unpack,
)
from stridepack.oracle import oracle_extract, oracle_pack
from stridepack.packing import column_of, locate, shift_amounts


@pytest.mark.parametrize(
    "bits,lanes,block,lo,hi",
    [(1, 8, 128, -1, 0), (2, 4, 64, -2, 1), (4, 2, 32, -8, 7), (8, 1, 16, -128, 127)],
)
def test_bitwidth_properties(bits, lanes, block, lo, hi):
    bw = BitWidth(bits)
    assert (bw.lanes_per_byte, bw.block_elems, bw.min_value, bw.max_value) == (lanes, block, lo, hi)


def test_bitwidth_rejects_other_widths():
    with pytest.raises(UnsupportedWidthError):
        BitWidth.parse(3)


def test_pack_zero_block():
    p = pack(SubByteTensor(4, np.zeros((1, 32), dtype=np.int8)))
    assert p.data.tobytes() == bytes(16)


def test_pack_ramp_matches_oracle_and_frozen_bytes():
    row = [(c % 16) - 8 for c in range(32)]
    p = pack(SubByteTensor(4, np.array([row])))
    assert p.data.tobytes() == oracle_pack([row], 4)
    assert p.data.tobytes() == bytes.fromhex("8899aabbccddeeff0011223344556677")


def test_pack_single_one_bit_value():
    row = [0] * 128
    row[17] = -1
    p = pack(SubByteTensor(1, np.array([row])))
    expected = oracle_pack([row], 1)
    assert p.data.tobytes() == expected
    assert expected[1] == 0b10 and sum(expected) == 0b10


def test_pack_out_of_range_names_position():
    vals = np.zeros((3, 40), dtype=np.int8)
    vals[2, 33] = 9
    with pytest.raises(ValueRangeError) as exc:
        SubByteTensor(4, vals)
    assert (exc.value.row, exc.value.col) == (2, 33)
    assert "row 2" in str(exc.value) and "col 33" in str(exc.value)


def test_pack_rejects_plain_bytes():
    with pytest.raises(UnsupportedWidthError):
        pack(SubByteTensor(8, np.zeros((1, 16), dtype=np.int8)))


def test_unpack_all_ones_nibbles():
    p = PackedMatrix(4, 1, 32, np.full(16, 0xFF, dtype=np.uint8))
    assert unpack(p).values.tolist() == [[-1] * 32]


def test_unpack_0x55_two_bit():
    # every 2-bit field of 0b01010101 is 01
    p = PackedMatrix(2, 1, 64, np.full(16, 0x55, dtype=np.uint8))
    assert unpack(p).values.tolist() == [[1] * 64]


def test_unpack_0x11_two_bit_alternates_groups():
    p = PackedMatrix(2, 1, 64, np.full(16, 0x11, dtype=np.uint8))
    v = unpack(p).values[0]
    assert (v[0:16] == 1).all() and (v[32:48] == 1).all()
    assert (v[16:32] == 0).all() and (v[48:64] == 0).all()


def test_wrong_data_length_is_corrupt():
    with pytest.raises(CorruptLayoutError):
        PackedMatrix(4, 2, 32, np.zeros(16, dtype=np.uint8))


@pytest.mark.parametrize(
    "byte,bits,expected",
    [(0x9A, 4, [-6, -7]), (0xB6, 2, [-2, 1, -1, -2]), (0x00, 1, [0] * 8), (0x00, 4, [0, 0])],
)
def test_extract_group_examples(byte, bits, expected):
    block = np.full(16, byte, dtype=np.uint8)
    got = [int(extract_group(block, s, bits)[0]) for s in range(8 // bits)]
    assert got == expected
    assert got == [oracle_extract(byte, s, bits) for s in range(8 // bits)]


def test_top_group_needs_only_the_right_shift():
    for bits in (1, 2, 4):
        top = 8 // bits - 1
        assert shift_amounts(top, bits) == (0, 8 - bits)


@pytest.mark.parametrize("bits", [1, 2, 4])
def test_extract_exhaustive(bits):
    block = np.arange(256, dtype=np.uint8)
    for s in range(8 // bits):
        got = extract_group(block, s, bits).tolist()
        assert got == [oracle_extract(b, s, bits) for b in range(256)]


@pytest.mark.parametrize("bits", [1, 2, 4])
def test_layout_is_a_bijection_over_a_block(bits):
    bw = BitWidth(bits)
    positions = {locate(c, bw) for c in range(bw.block_elems)}
    assert len(positions) == bw.block_elems
    assert {column_of(i, b, s, bw) for i, b, s in positions} == set(range(bw.block_elems))


@pytest.mark.parametrize("bits", [1, 2, 4])
def test_padding_decodes_to_zero(bits, rng):
    vals = rng.integers(-(1 << (bits - 1)), 1 << (bits - 1), size=(2, 5), dtype=np.int8)
    p = pack(SubByteTensor(bits, vals))
    full = PackedMatrix(bits, 2, p.padded_cols, p.data)
    assert not unpack(full).values[:, 5:].any()


def test_footprint_formula():
    assert packed_nbytes(2048, 2048, 4) == 2048 * 64 * 16
    assert packed_nbytes(3, 33, 4) == 3 * 2 * 16
    assert packed_nbytes(3, 33, 8) == 99


@st.composite
def tensors(draw):
    bits = draw(st.sampled_from([1, 2, 4]))
    rows = draw(st.integers(1, 5))
    cols = draw(st.integers(1, 300))
    lo, hi = -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    flat = draw(st.lists(st.integers(lo, hi), min_size=rows * cols, max_size=rows * cols))
    return SubByteTensor(bits, np.array(flat, dtype=np.int8).reshape(rows, cols))


@settings(max_examples=200, deadline=None)
@given(tensors())
def test_round_trip_property(t):
    p = pack(t)
    assert unpack(p) == t
    assert p.nbytes == t.rows * -(-t.cols // t.bits.block_elems) * 16
    assert p.data.tobytes() == oracle_pack(t.values.tolist(), int(t.bits))
