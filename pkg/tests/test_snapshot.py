import struct

import numpy as np
import pytest

from conftest import random_instance
from twmsketch.errors import CorruptSnapshot, VersionMismatch
from twmsketch.events import batch_by_timestamp
from twmsketch.schemes import cawn_decay, time_decay, uniform_count
from twmsketch.sketch import SketchState
from twmsketch.snapshot import MAGIC, crc64, restore, snapshot

SCHEMES = [uniform_count(), time_decay(1e-5), cawn_decay(0.5)]


def _states_equal(a, b):
    assert a.k == b.k and a.dim == b.dim and a.seed == b.seed
    assert a.scheme == b.scheme
    assert a.capacity == b.capacity and a.n_seen == b.n_seen
    assert a.t_now == b.t_now and a.t_prev == b.t_prev
    for l in range(a.k + 1):
        assert np.array_equal(a.H[l], b.H[l])
    assert np.array_equal(a.degree, b.degree)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_roundtrip_bitwise(scheme):
    events, n = random_instance(61, e_lo=200, e_hi=300)
    st = SketchState(3, 8, scheme, seed=42, n_hint=n)
    st.replay(batch_by_timestamp(events))
    _states_equal(st, restore(snapshot(st)))


def test_truncated_image():
    st = SketchState(1, 4, uniform_count(), seed=1, n_hint=2)
    img = snapshot(st)
    with pytest.raises(CorruptSnapshot):
        restore(img[:-3])
    with pytest.raises(CorruptSnapshot):
        restore(img[: len(MAGIC) + 4])


def test_bad_magic_and_flipped_byte():
    st = SketchState(1, 4, uniform_count(), seed=1, n_hint=2)
    img = bytearray(snapshot(st))
    with pytest.raises(CorruptSnapshot):
        restore(b"NOTMAGIC" + bytes(img[8:]))
    img[len(MAGIC) + 40] ^= 0xFF  # corrupt payload, checksum must catch it
    with pytest.raises(CorruptSnapshot):
        restore(bytes(img))


def test_version_mismatch():
    st = SketchState(1, 4, uniform_count(), seed=1, n_hint=2)
    img = bytearray(snapshot(st))
    img[len(MAGIC):len(MAGIC) + 4] = struct.pack("<I", 99)
    payload = bytes(img[len(MAGIC):-8])
    img[-8:] = struct.pack("<Q", crc64(payload))  # recompute valid checksum
    with pytest.raises(VersionMismatch):
        restore(bytes(img))


def test_crc64_known_vector():
    # CRC-64/XZ check value for the standard 9-byte test input
    assert crc64(b"123456789") == 0x995DC9BBDF1939FA


@pytest.mark.parametrize("scheme", SCHEMES)
def test_restore_then_continue_equals_uninterrupted(scheme):
    events, n = random_instance(62, e_lo=150, e_hi=250)
    batches = batch_by_timestamp(events)
    cut = len(batches) // 2
    full = SketchState(3, 8, scheme, seed=7, n_hint=n)
    full.replay(batches)
    half = SketchState(3, 8, scheme, seed=7, n_hint=n)
    half.replay(batches[:cut])
    resumed = restore(snapshot(half))
    resumed.replay(batches[cut:])
    _states_equal(full, resumed)
