import math

import numpy as np
import pytest

from conftest import random_instance
from twmsketch.errors import (
    CapacityOverflow,
    HopOutOfRange,
    TimestampRegression,
)
from twmsketch.events import InteractionEvent, batch_by_timestamp
from twmsketch.oracle import exact_matrices
from twmsketch.schemes import cawn_decay, time_decay, uniform_count
from twmsketch.sketch import SketchState, projection_matrix, seeded_row


def test_init_deterministic():
    a = SketchState(3, 4, uniform_count(), seed=9, n_hint=10)
    b = SketchState(3, 4, uniform_count(), seed=9, n_hint=10)
    assert np.array_equal(a.H[0], b.H[0])
    assert not a.H[2].any()


def test_seeded_row_independent_of_growth_order():
    lazy = SketchState(2, 8, uniform_count(), seed=1)
    lazy.apply_event(InteractionEvent(7, 2, 1.0))  # forces growth to 8+
    eager = SketchState(2, 8, uniform_count(), seed=1, n_hint=20)
    top = lazy.capacity
    assert np.array_equal(lazy.H[0], eager.H[0][:top])
    assert np.array_equal(seeded_row(1, 7, 8), eager.H[0][7])


def test_init_variance():
    rows = projection_matrix(seed=123, n=10_000, dim=8)
    var = rows.var(axis=0)
    assert np.allclose(var, 1.0 / 8, rtol=0.05)
    assert abs(rows.mean()) < 0.005


def test_apply_event_count_toy(toy_events):
    st = SketchState(2, 6, uniform_count(), seed=4)
    for e in toy_events:
        st.apply_event(e)
    # the single 2-hop walk 2->1->0 lands row 0 of the projection in H(2)_2
    assert np.allclose(st.H[2][2], seeded_row(4, 0, 6), rtol=1e-12)


def test_apply_event_decay_single_edge():
    lam = 1e-3
    st = SketchState(1, 6, time_decay(lam), seed=4)
    st.apply_event(InteractionEvent(0, 1, 5.0))
    p1 = seeded_row(4, 1, 6)
    assert np.allclose(st.H[1][0], math.exp(lam * 5.0) * p1, rtol=1e-12)
    assert np.allclose(st.rescaled_row(0, 1), p1, rtol=1e-12)


def test_locality():
    events, n = random_instance(21)
    for scheme in (uniform_count(), time_decay(1e-4), cawn_decay(1.0)):
        st = SketchState(3, 8, scheme, seed=2, n_hint=n)
        before = [h.copy() for h in st.H]
        e = events[0]
        st.apply_event(e)
        untouched = [i for i in range(n) if i not in (e.u, e.v)]
        assert np.array_equal(st.H[0], before[0])
        for l in range(1, 4):
            assert np.array_equal(st.H[l][untouched], before[l][untouched])


def test_timestamp_regression():
    st = SketchState(1, 4, uniform_count(), seed=0)
    st.apply_event(InteractionEvent(0, 1, 2.0))
    with pytest.raises(TimestampRegression):
        st.apply_event(InteractionEvent(1, 2, 1.0))


def test_self_loop_rejected():
    st = SketchState(1, 4, uniform_count(), seed=0)
    with pytest.raises(ValueError):
        st.apply_event(InteractionEvent(3, 3, 1.0))


def test_capacity_hard_cap():
    st = SketchState(1, 4, uniform_count(), seed=0, hard_cap=4)
    st.apply_event(InteractionEvent(0, 1, 1.0))
    with pytest.raises(CapacityOverflow):
        st.apply_event(InteractionEvent(0, 9, 2.0))


def test_rescaled_row_contracts():
    st = SketchState(2, 4, uniform_count(), seed=5, n_hint=3)
    assert np.array_equal(st.rescaled_row(1, 0), seeded_row(5, 1, 4))
    # beyond capacity: hop 0 synthesized, higher hops zero
    assert np.array_equal(st.rescaled_row(50, 0), seeded_row(5, 50, 4))
    assert not st.rescaled_row(50, 2).any()
    with pytest.raises(HopOutOfRange):
        st.rescaled_row(0, 3)


@pytest.mark.parametrize("scheme,tol", [
    (uniform_count(), 1e-9),
    (time_decay(1e-4), 1e-6),
    (time_decay(1e-7), 1e-6),
    (cawn_decay(1.0), 1e-6),
])
def test_exactness_random_instance(scheme, tol):
    """Rescaled sketch rows equal the exact walk matrices times the seeded
    projection, on a random distinct-timestamp instance."""
    events, n = random_instance(33)
    k, dim, seed = 3, 16, 77
    st = SketchState(k, dim, scheme, seed, n_hint=n)
    for e in events:
        st.apply_event(e)
    ms = exact_matrices(events, scheme, k, n)
    proj = projection_matrix(seed, n, dim)
    for l in range(k + 1):
        target = ms.A[l] @ proj
        got = np.stack([st.rescaled_row(i, l) for i in range(n)])
        scale = max(1.0, np.abs(target).max())
        rel = np.abs(got - target) / np.maximum(np.abs(target), 1e-12 * scale)
        assert rel.max() < tol


def test_estimate_similarity_toy(toy_events):
    # dimension near the preservation bound keeps deviations within eps*c
    st = SketchState(2, 256, uniform_count(), seed=11)
    for e in toy_events:
        st.apply_event(e)
    est = st.estimate_similarity(2, 0)
    assert abs(est[2] - 1.0) < 0.5
    assert abs(est[0]) < 0.5 and abs(est[1]) < 0.5


def test_estimate_similarity_fresh_state():
    st = SketchState(2, 256, uniform_count(), seed=13, n_hint=4)
    est = st.estimate_similarity(0, 1)
    assert np.abs(est).max() < 0.5
    self_est = st.estimate_similarity(0, 0)
    assert abs(self_est[0] - 1.0) < 0.5


def test_memory_model():
    st = SketchState(3, 8, uniform_count(), seed=0, n_hint=10)
    assert st.memory_model_bytes() == 4 * 10 * 8 * 8
    assert st.allocated_bytes() == st.memory_model_bytes()


def test_replay_equals_manual_batches():
    events, n = random_instance(44, distinct=False)
    a = SketchState(2, 8, uniform_count(), seed=3, n_hint=n)
    a.replay(batch_by_timestamp(events))
    b = SketchState(2, 8, uniform_count(), seed=3, n_hint=n)
    for batch in batch_by_timestamp(events):
        b.apply_batch(batch)
    for l in range(3):
        assert np.array_equal(a.H[l], b.H[l])
