"""Versioned binary snapshot of a sketch state.

Layout (all little-endian):

    magic     8 bytes  b"TWMSKTCH"
    payload:
      version   u32
      capacity  u64
      n_seen    u64
      k         u32
      dim       u32
      scheme    u8   (0 decay, 1 count, 2 cawn)
      param     f64
      seed      u64
      t_now     f64
      t_prev    f64
      H         (k+1) * capacity * dim f64, row-major, hop-major
      degree    capacity f64 (cawn only)
    crc       u64  CRC-64/XZ of the payload

restore(snapshot(s)) reproduces s bitwise.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import CorruptSnapshot, VersionMismatch
from .schemes import CAWN_DECAY, ScoreScheme
from .sketch import SketchState

MAGIC = b"TWMSKTCH"
VERSION = 1
_HEADER = struct.Struct("<IQQIIBdQdd")

_CRC_POLY = 0xC96C5795D7870F42  # CRC-64/XZ, reflected


def _crc_table():
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            crc = (crc >> 1) ^ _CRC_POLY if crc & 1 else crc >> 1
        table.append(crc)
    return table


_TABLE = _crc_table()


def crc64(data: bytes) -> int:
    crc = 0xFFFFFFFFFFFFFFFF
    for b in data:
        crc = (crc >> 8) ^ _TABLE[(crc ^ b) & 0xFF]
    return crc ^ 0xFFFFFFFFFFFFFFFF


_TAG_TO_VARIANT = {v: k for k, v in SketchState.SCHEME_TAGS.items()}


def snapshot(state: SketchState) -> bytes:
    header = _HEADER.pack(
        VERSION,
        state.capacity,
        state.n_seen,
        state.k,
        state.dim,
        SketchState.SCHEME_TAGS[state.scheme.variant],
        state.scheme.param,
        state.seed & 0xFFFFFFFFFFFFFFFF,
        state.t_now,
        state.t_prev,
    )
    chunks = [header]
    for l in range(state.k + 1):
        chunks.append(np.ascontiguousarray(state.H[l]).tobytes())
    if state.scheme.variant == CAWN_DECAY:
        chunks.append(state.degree.tobytes())
    payload = b"".join(chunks)
    return MAGIC + payload + struct.pack("<Q", crc64(payload))


def restore(image: bytes) -> SketchState:
    if len(image) < len(MAGIC) + _HEADER.size + 8:
        raise CorruptSnapshot("image truncated")
    if image[: len(MAGIC)] != MAGIC:
        raise CorruptSnapshot("bad magic")
    payload, (crc_stored,) = image[len(MAGIC):-8], struct.unpack("<Q", image[-8:])
    if crc64(payload) != crc_stored:
        raise CorruptSnapshot("checksum mismatch")
    (version, capacity, n_seen, k, dim, tag, param, seed, t_now,
     t_prev) = _HEADER.unpack_from(payload)
    if version != VERSION:
        raise VersionMismatch(f"snapshot version {version}, expected {VERSION}")
    try:
        scheme = ScoreScheme(_TAG_TO_VARIANT[tag], param)
    except KeyError:
        raise CorruptSnapshot(f"unknown scheme tag {tag}") from None
    mat_bytes = capacity * dim * 8
    expected = _HEADER.size + (k + 1) * mat_bytes
    if scheme.variant == CAWN_DECAY:
        expected += capacity * 8
    if len(payload) != expected:
        raise CorruptSnapshot(
            f"payload length {len(payload)}, expected {expected}"
        )
    state = SketchState.__new__(SketchState)
    state.k = k
    state.dim = dim
    state.scheme = scheme
    state.seed = seed
    state.hard_cap = None
    state.capacity = capacity
    state.n_seen = n_seen
    state.t_now = t_now
    state.t_prev = t_prev
    offset = _HEADER.size
    state.H = []
    for _ in range(k + 1):
        mat = np.frombuffer(payload, dtype="<f8", count=capacity * dim,
                            offset=offset).reshape(capacity, dim).copy()
        state.H.append(mat)
        offset += mat_bytes
    if scheme.variant == CAWN_DECAY:
        state.degree = np.frombuffer(payload, dtype="<f8", count=capacity,
                                     offset=offset).copy()
    else:
        state.degree = np.zeros(capacity)
    return state
