import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from ecregen.container import (
    HEADER_SIZE,
    ShardFile,
    crc32,
    frame_with_crc,
    make_checker,
    pack_symbols,
    payload_capacity,
    payload_to_symbols,
    read_shard,
    shard_path,
    stripe,
    symbols_to_payload,
    unpack_symbols,
    unstripe,
    verify_crc,
    write_shard,
)
from ecregen.errors import IntegrityFailure, InvalidParameter, ShardFormatError
from ecregen.msr import MsrCode, MsrParams


def test_pack_examples():
    assert pack_symbols(b"", 5) == []
    assert pack_symbols(b"\xff", 5) == [31, 28]
    assert pack_symbols(bytes([1, 200, 7]), 8) == [1, 200, 7]
    assert pack_symbols(b"\xab", 4) == [0xA, 0xB]
    with pytest.raises(InvalidParameter):
        pack_symbols(b"x", 1)


@given(st.binary(max_size=64), st.integers(2, 16))
def test_pack_matches_bit_oracle_and_roundtrips(data, m):
    syms = pack_symbols(data, m)
    bits = oracles.bits_msb_first(data)
    bits += [0] * ((-len(bits)) % m)
    expect = [int("".join(map(str, bits[i:i + m])), 2) for i in range(0, len(bits), m)]
    assert syms == expect
    assert all(0 <= s < (1 << m) for s in syms)
    assert unpack_symbols(syms, m, 8 * len(data)) == data


def test_crc_check_value():
    assert oracles.crc32(b"123456789") == 0xCBF43926
    assert crc32(b"123456789") == 0xCBF43926


@given(st.binary(max_size=200))
def test_crc_matches_bitwise_oracle(data):
    assert crc32(data) == oracles.crc32(data)


@given(st.binary(max_size=100))
def test_frame_roundtrip(data):
    framed = frame_with_crc(data)
    assert framed[:4] == struct.pack("<I", len(data))
    assert verify_crc(framed) == data
    assert verify_crc(framed + b"\x00" * 7) == data


def test_every_single_bit_flip_is_detected():
    framed = frame_with_crc(b"regenerating codes")
    for byte in range(len(framed)):
        for bit in range(8):
            bad = bytearray(framed)
            bad[byte] ^= 1 << bit
            with pytest.raises(IntegrityFailure):
                verify_crc(bytes(bad))


def test_truncated_frame():
    with pytest.raises(IntegrityFailure):
        verify_crc(b"\x01\x00")
    with pytest.raises(IntegrityFailure):
        verify_crc(frame_with_crc(b"abcdef")[:-2])


def test_stripe_shapes():
    assert stripe(list(range(6)), 6) == [list(range(6))]
    assert stripe([], 6) == []
    assert stripe([1, 2, 3], 2) == [[1, 2], [3, 0]]
    assert unstripe(stripe([1, 2, 3], 2), 3) == [1, 2, 3]
    with pytest.raises(InvalidParameter):
        stripe([1], 0)


@given(st.binary(max_size=300), st.sampled_from([(5, 90), (5, 135), (3, 12), (8, 7)]))
def test_payload_symbol_roundtrip(data, mb):
    m, B = mb
    syms = payload_to_symbols(data, m, B)
    assert len(syms) % B == 0
    assert symbols_to_payload(syms, m) == data
    assert make_checker(m)(syms)


def test_capacity_fits_exactly_one_block():
    cap = payload_capacity(5, 90)
    assert cap == 48
    assert len(payload_to_symbols(b"x" * cap, 5, 90)) == 90
    assert len(payload_to_symbols(b"x" * (cap + 1), 5, 90)) == 180


def test_checker_rejects_corruption():
    syms = payload_to_symbols(b"hello world", 5, 90)
    syms[3] ^= 1
    assert not make_checker(5)(syms)


def _shard(**kw):
    base = dict(scheme="msr", m=5, n=20, k=10, d=18, node_index=3, gamma=1, block_count=2,
                symbols_per_block=9, original_byte_len=77, symbols=list(range(18)))
    base.update(kw)
    return ShardFile(**base)


def test_shard_header_is_bit_exact():
    raw = _shard().to_bytes()
    assert HEADER_SIZE == 34
    expect = (b"ECRG" + bytes([1, 1, 5, 0]) + struct.pack("<HHHHH", 20, 10, 18, 3, 1)
              + struct.pack("<IIQ", 2, 9, 77))
    assert raw[:HEADER_SIZE] == expect
    assert raw[HEADER_SIZE:] == b"".join(struct.pack("<H", s) for s in range(18))


def test_shard_roundtrip(tmp_path):
    sh = _shard(scheme="mbr", gamma=1, symbols=[31] * 18)
    path = shard_path(tmp_path, 3)
    assert path.name == "node_3.ecrg"
    write_shard(path, sh)
    back = read_shard(path)
    assert back == sh
    assert back.block(1) == [31] * 9
    assert back.header_key() == sh.header_key()


@pytest.mark.parametrize("mutate", [
    lambda r: b"XCRG" + r[4:],
    lambda r: r[:4] + b"\x02" + r[5:],
    lambda r: r[:5] + b"\x09" + r[6:],
    lambda r: r[:6] + b"\x01" + r[7:],
    lambda r: r[:-2],
    lambda r: r[:10],
])
def test_malformed_shards_rejected(mutate):
    with pytest.raises(ShardFormatError):
        ShardFile.from_bytes(mutate(_shard().to_bytes()))


def test_out_of_field_symbols():
    raw = bytearray(_shard().to_bytes())
    raw[HEADER_SIZE + 1] = 0xFF
    with pytest.raises(ShardFormatError):
        ShardFile.from_bytes(bytes(raw))
    lenient = ShardFile.from_bytes(bytes(raw), strict=False)
    assert all(0 <= s < 32 for s in lenient.symbols)


def test_inconsistent_symbol_count_rejected():
    with pytest.raises(ShardFormatError):
        _shard(symbols=[0] * 17).to_bytes()


def test_bytes_survive_encode_corrupt_reconstruct(rng):
    code = MsrCode(MsrParams(20, 10, 5))
    data = rng.integers(0, 256, 500, dtype=np.uint8).tobytes()
    shares = code.encode_blocks(payload_to_symbols(data, 5, 90))
    stored = {sh.node_index: sh.symbols for sh in shares}
    for i in (2, 8, 11):
        stored[i] = rng.integers(0, 32, len(stored[i])).tolist()
    res = code.reconstruct(stored.get, check=make_checker(5))
    assert symbols_to_payload(res.message, 5) == data
