import json
import math

import numpy as np

from conftest import random_instance
from twmsketch.events import batch_by_timestamp
from twmsketch.pairwise import (
    pairwise_feature,
    raw_pairwise,
    scale_pairwise,
    stack_features,
    to_csv_row,
    to_json_record,
)
from twmsketch.schemes import time_decay, uniform_count
from twmsketch.sketch import SketchState, seeded_row


def _replayed_state(seed=17, scheme=None):
    events, n = random_instance(71)
    scheme = scheme or time_decay(1e-4)
    st = SketchState(3, 16, scheme, seed, n_hint=n)
    st.replay(batch_by_timestamp(events))
    return st, n


def test_stack_fresh_state():
    st = SketchState(2, 8, uniform_count(), seed=3, n_hint=4)
    F = stack_features(st, 0, 1)
    assert F.shape == (6, 8)
    assert np.array_equal(F[0], seeded_row(3, 0, 8))
    assert np.array_equal(F[3], seeded_row(3, 1, 8))
    assert not F[[1, 2, 4, 5]].any()


def test_stack_same_node_halves():
    st, _ = _replayed_state()
    F = stack_features(st, 5, 5)
    k1 = st.k + 1
    assert np.array_equal(F[:k1], F[k1:])


def test_stack_toy_hop2(toy_events):
    st = SketchState(2, 8, uniform_count(), seed=9)
    for e in toy_events:
        st.apply_event(e)
    F = stack_features(st, 2, 0)
    assert np.allclose(F[2], seeded_row(9, 0, 8), rtol=1e-12)


def test_raw_symmetric_and_diagonal():
    st, n = _replayed_state()
    raw = raw_pairwise(st, 1, 2)
    side = 2 * (st.k + 1)
    G = raw.reshape(side, side)
    assert np.allclose(G, G.T, rtol=1e-12, atol=1e-15)
    assert (np.diag(G) >= 0).all()


def test_raw_fresh_state_structure():
    st = SketchState(3, 512, uniform_count(), seed=23, n_hint=4)
    G = raw_pairwise(st, 0, 1).reshape(8, 8)
    assert abs(G[0, 0] - 1.0) < 0.3          # ~ squared norm of a unit row
    assert abs(G[0, 4]) < 0.3                # independent rows, near zero
    hot = {(0, 0), (0, 4), (4, 0), (4, 4)}
    for i in range(8):
        for j in range(8):
            if (i, j) not in hot:
                assert G[i, j] == 0.0        # untouched hops are exact zeros


def test_raw_consistent_with_estimate_similarity():
    st, n = _replayed_state()
    u, v = 2, 7
    G = raw_pairwise(st, u, v).reshape(8, 8)
    est = st.estimate_similarity(u, v)
    k1 = st.k + 1
    sub = np.array([G[l, k1] for l in range(k1)])
    assert np.allclose(sub, est, rtol=1e-12, atol=1e-15)


def test_block_swap_relation():
    st, n = _replayed_state()
    u, v = 3, 9
    side = 2 * (st.k + 1)
    k1 = st.k + 1
    G_uv = raw_pairwise(st, u, v).reshape(side, side)
    G_vu = raw_pairwise(st, v, u).reshape(side, side)
    perm = list(range(k1, side)) + list(range(k1))
    assert np.array_equal(G_uv, G_vu[np.ix_(perm, perm)])


def test_scale_values():
    raw = np.array([0.0, -5.0, math.e - 1.0])
    out = scale_pairwise(raw)
    assert out[0] == 0.0
    assert out[1] == 0.0
    assert abs(out[2] - 1.0) < 1e-15


def test_scale_monotone_nonnegative():
    xs = np.linspace(-3, 10, 200)
    ys = scale_pairwise(xs)
    assert (ys >= 0).all()
    assert (np.diff(ys) >= 0).all()
    assert (ys[xs <= 0] == 0).all()


def test_feature_exports():
    st, _ = _replayed_state()
    feat = pairwise_feature(st, 0, 1)
    assert feat.raw.shape == (4 * (st.k + 1) ** 2,)
    record = json.loads(to_json_record(feat))
    assert record["u"] == 0 and record["v"] == 1
    assert record["raw"] == feat.raw.tolist()
    row = to_csv_row(feat).split(",")
    assert len(row) == 3 + 2 * feat.raw.size
