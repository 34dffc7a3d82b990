"""Byte payloads <-> code symbols, CRC-32 framing and the shard file format.

A payload is framed as ``len:u32le || bytes || crc32(len || bytes):u32le``,
packed MSB-first into m-bit symbols and zero-padded to whole B-symbol blocks.
The CRC lives inside the encoded data so reconstruction rounds can be gated
on it.

Shard layout (all little-endian)::

    "ECRG" | version u8 | scheme u8 | m u8 | reserved u8 | n u16 | k u16 | d u16
    | node_index u16 | gamma u16 | block_count u32 | symbols_per_block u32
    | original_byte_len u64 | symbols as u16
"""
from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IntegrityFailure, InvalidParameter, ShardFormatError

MAGIC = b"ECRG"
VERSION = 1
SCHEME_MSR = 1
SCHEME_MBR = 2
SCHEME_NAMES = {SCHEME_MSR: "msr", SCHEME_MBR: "mbr"}
SCHEME_IDS = {v: k for k, v in SCHEME_NAMES.items()}

_HEADER = struct.Struct("<4sBBBBHHHHHIIQ")
HEADER_SIZE = _HEADER.size
FRAME_OVERHEAD = 8


def crc32(data: bytes) -> int:
    return zlib.crc32(data) & 0xFFFFFFFF


def frame_with_crc(payload: bytes) -> bytes:
    body = struct.pack("<I", len(payload)) + bytes(payload)
    return body + struct.pack("<I", crc32(body))


def verify_crc(framed: bytes) -> bytes:
    """Return the payload of a frame, ignoring trailing padding.

    Raises IntegrityFailure if the frame is truncated or its CRC mismatches.
    """
    if len(framed) < FRAME_OVERHEAD:
        raise IntegrityFailure("frame shorter than its header")
    (length,) = struct.unpack_from("<I", framed)
    end = 4 + length
    if end + 4 > len(framed):
        raise IntegrityFailure("frame length field exceeds data")
    (stored,) = struct.unpack_from("<I", framed, end)
    if crc32(framed[:end]) != stored:
        raise IntegrityFailure("CRC-32 mismatch")
    return bytes(framed[4:end])


def pack_symbols(data: bytes, m: int):
    """Slice the MSB-first bitstream of ``data`` into m-bit symbols."""
    if not 2 <= m <= 16:
        raise InvalidParameter(f"m must be in [2, 16], got {m}")
    if not data:
        return []
    bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    pad = (-len(bits)) % m
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
    return (bits.reshape(-1, m).astype(np.int64) @ weights).tolist()


def unpack_symbols(symbols, m: int, bit_length: int | None = None) -> bytes:
    """Inverse of pack_symbols; keeps ``bit_length`` bits (default: all whole bytes)."""
    if not symbols:
        return b""
    arr = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    bits = ((arr[:, None] >> shifts[None, :]) & 1).astype(np.uint8).reshape(-1)
    if bit_length is None:
        bit_length = len(bits) - len(bits) % 8
    return np.packbits(bits[:bit_length]).tobytes()


def stripe(symbols, B: int):
    """Zero-pad to a multiple of B and cut into B-symbol blocks."""
    if B <= 0:
        raise InvalidParameter("block size must be positive")
    symbols = list(symbols)
    symbols += [0] * ((-len(symbols)) % B)
    return [symbols[i:i + B] for i in range(0, len(symbols), B)]


def unstripe(blocks, length: int | None = None):
    out = [s for block in blocks for s in block]
    return out if length is None else out[:length]


def payload_to_symbols(payload: bytes, m: int, B: int):
    """Frame, pack and stripe a payload; returns the flat, block-aligned symbol list."""
    return unstripe(stripe(pack_symbols(frame_with_crc(payload), m), B))


def symbols_to_payload(symbols, m: int) -> bytes:
    """Unpack and verify; raises IntegrityFailure on a bad frame."""
    return verify_crc(unpack_symbols(symbols, m))


def payload_capacity(m: int, B: int, blocks: int = 1) -> int:
    """Largest payload (bytes) that fits in ``blocks`` blocks."""
    return max(0, (blocks * B * m) // 8 - FRAME_OVERHEAD)


def make_checker(m: int):
    """Integrity predicate over reconstructed message symbols."""
    def check(symbols):
        try:
            symbols_to_payload(symbols, m)
        except IntegrityFailure:
            return False
        return True
    return check


@dataclass
class ShardFile:
    scheme: str
    m: int
    n: int
    k: int
    d: int
    node_index: int
    gamma: int
    block_count: int
    symbols_per_block: int
    original_byte_len: int
    symbols: list

    def header_key(self):
        """Fields every shard of one encoding must share."""
        return (self.scheme, self.m, self.n, self.k, self.d, self.gamma,
                self.block_count, self.symbols_per_block, self.original_byte_len)

    def to_bytes(self) -> bytes:
        if len(self.symbols) != self.block_count * self.symbols_per_block:
            raise ShardFormatError("symbol count does not match block_count * symbols_per_block")
        header = _HEADER.pack(MAGIC, VERSION, SCHEME_IDS[self.scheme], self.m, 0,
                              self.n, self.k, self.d, self.node_index, self.gamma,
                              self.block_count, self.symbols_per_block, self.original_byte_len)
        return header + np.asarray(self.symbols, dtype="<u2").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes, strict: bool = True) -> "ShardFile":
        """Parse a shard.  With ``strict=False`` out-of-range symbols are masked
        into the field instead of rejected (a corrupted node is still a node)."""
        if len(raw) < HEADER_SIZE:
            raise ShardFormatError("file shorter than the shard header")
        (magic, version, scheme, m, _reserved, n, k, d, node, gamma,
         blocks, per_block, orig_len) = _HEADER.unpack_from(raw)
        if magic != MAGIC:
            raise ShardFormatError(f"bad magic {magic!r}")
        if version != VERSION:
            raise ShardFormatError(f"unsupported version {version}")
        if scheme not in SCHEME_NAMES:
            raise ShardFormatError(f"unknown scheme id {scheme}")
        if not 2 <= m <= 16:
            raise ShardFormatError(f"bad field degree {m}")
        body = raw[HEADER_SIZE:]
        if len(body) != 2 * blocks * per_block:
            raise ShardFormatError("payload length does not match header")
        syms = np.frombuffer(body, dtype="<u2").astype(np.int64)
        if syms.size and syms.max() >= (1 << m):
            if strict:
                raise ShardFormatError(f"symbol outside GF(2^{m})")
            syms &= (1 << m) - 1
        return cls(SCHEME_NAMES[scheme], m, n, k, d, node, gamma, blocks, per_block,
                   orig_len, syms.tolist())

    def block(self, b: int):
        s = self.symbols_per_block
        return self.symbols[b * s:(b + 1) * s]


def shard_path(directory, node_index: int) -> Path:
    return Path(directory) / f"node_{node_index}.ecrg"


def write_shard(path, shard: ShardFile):
    Path(path).write_bytes(shard.to_bytes())


def read_shard(path, strict: bool = True) -> ShardFile:
    return ShardFile.from_bytes(Path(path).read_bytes(), strict=strict)
