"""Incremental sketch of temporal walk matrices via random feature propagation.

The state holds (k+1) row-major matrices H(0..k) of shape n x dim.  H(0)
rows are seeded Gaussian features (mean 0, variance 1/dim) generated by a
counter-based generator keyed by (seed, node), so node capacity can grow
lazily without perturbing existing rows and the identical projection
matrix can be rebuilt for oracle comparisons.  Each event touches only the
two endpoint rows of H(1..k); suitably rescaled, H(l) always equals the
exact walk matrix A(l) times the seeded projection.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    CapacityOverflow,
    HopOutOfRange,
    TimestampRegression,
)
from .events import EventBatch
from .schemes import CAWN_DECAY, TIME_DECAY, UNIFORM_COUNT, ScoreScheme

_MASK64 = (1 << 64) - 1


def seeded_row(seed: int, node: int, dim: int) -> np.ndarray:
    """Deterministic Gaussian feature row, N(0, 1/dim) entries.

    A pure function of (seed, node, dim): the same arguments always yield
    the bitwise-identical row, independent of allocation history.
    """
    bitgen = np.random.Philox(key=np.array([seed & _MASK64, node], dtype=np.uint64))
    rng = np.random.Generator(bitgen)
    return rng.standard_normal(dim) / math.sqrt(dim)


def projection_matrix(seed: int, n: int, dim: int) -> np.ndarray:
    """The n x dim matrix whose row i is seeded_row(seed, i, dim)."""
    return np.stack([seeded_row(seed, i, dim) for i in range(n)])


def _canonical(events):
    """Fixed intra-batch accumulation order for bit-reproducible sums."""
    return sorted(events, key=lambda e: (min(e.u, e.v), max(e.u, e.v)))


class SketchState:
    """Mutable sketch under a chronological interaction stream.

    Single writer: updates are strictly serialized.  Reads are safe on a
    quiesced state.  Equal-timestamp events must be applied through
    apply_batch; apply_event assumes distinct event timestamps.
    """

    SCHEME_TAGS = {TIME_DECAY: 0, UNIFORM_COUNT: 1, CAWN_DECAY: 2}

    def __init__(self, k: int, dim: int, scheme: ScoreScheme, seed: int,
                 n_hint: int = 0, hard_cap: int | None = None):
        if k < 1:
            raise ValueError("k must be >= 1")
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.k = k
        self.dim = dim
        self.scheme = scheme
        self.seed = seed
        self.hard_cap = hard_cap
        self.capacity = 0
        self.n_seen = 0
        self.t_now = 0.0
        self.t_prev = 0.0
        self.H: list[np.ndarray] = [np.zeros((0, dim)) for _ in range(k + 1)]
        self.degree = np.zeros(0)  # causal-decay degree vector, cawn only
        if n_hint > 0:
            self._grow(n_hint)

    # -- capacity ----------------------------------------------------------

    def _grow(self, new_cap: int):
        if self.hard_cap is not None and new_cap > self.hard_cap:
            raise CapacityOverflow(
                f"need capacity {new_cap}, hard cap {self.hard_cap}"
            )
        old = self.capacity
        fresh = np.stack([seeded_row(self.seed, i, self.dim)
                          for i in range(old, new_cap)])
        self.H[0] = np.vstack([self.H[0], fresh]) if old else fresh
        for l in range(1, self.k + 1):
            grown = np.zeros((new_cap, self.dim))
            grown[:old] = self.H[l]
            self.H[l] = grown
        grown_deg = np.zeros(new_cap)
        grown_deg[:old] = self.degree
        self.degree = grown_deg
        self.capacity = new_cap

    def _ensure(self, *nodes):
        top = max(nodes)
        if top >= self.capacity:
            self._grow(max(top + 1, 2 * self.capacity))
        self.n_seen = max(self.n_seen, top + 1)

    # -- updates -----------------------------------------------------------

    def apply_event(self, event):
        """Apply one interaction; endpoints' rows of H(1..k) are updated
        high-hop-first from pre-update values."""
        u, v, t = event.u, event.v, event.t
        if t < self.t_now:
            raise TimestampRegression(f"event at {t} behind clock {self.t_now}")
        if u == v:
            raise ValueError("self-loop events are not accepted")
        self._ensure(u, v)
        H = self.H
        variant = self.scheme.variant
        if variant == CAWN_DECAY:
            alpha = self.scheme.param
            self.degree *= math.exp(-alpha * (t - self.t_prev))
            du, dv = self.degree[u], self.degree[v]
            for l in range(self.k, 0, -1):
                H[l][u] = (du / (du + 1.0)) * H[l][u] + H[l - 1][v] / (du + 1.0)
                H[l][v] = (dv / (dv + 1.0)) * H[l][v] + H[l - 1][u] / (dv + 1.0)
            self.degree[u] = du + 1.0
            self.degree[v] = dv + 1.0
            self.t_prev = t
        else:
            w = math.exp(self.scheme.param * t) if variant == TIME_DECAY else 1.0
            for l in range(self.k, 0, -1):
                H[l][u] += w * H[l - 1][v]
                H[l][v] += w * H[l - 1][u]
        self.t_now = t

    def apply_batch(self, batch: EventBatch):
        """Apply all same-timestamp events of a batch at once.

        Every event's contribution is computed from the pre-batch state and
        the contributions are summed in a canonical order, so the result is
        independent of event order within the batch.
        """
        t = batch.t
        if t < self.t_now:
            raise TimestampRegression(f"batch at {t} behind clock {self.t_now}")
        for e in batch.events:
            if e.t != t:
                raise ValueError("batch contains a foreign timestamp")
            if e.u == e.v:
                raise ValueError("self-loop events are not accepted")
            self._ensure(e.u, e.v)
        canon = _canonical(batch.events)
        H = self.H
        variant = self.scheme.variant
        if variant == CAWN_DECAY:
            alpha = self.scheme.param
            self.degree *= math.exp(-alpha * (t - self.t_prev))
            multiplicity: dict[int, float] = {}
            for e in canon:
                multiplicity[e.u] = multiplicity.get(e.u, 0.0) + 1.0
                multiplicity[e.v] = multiplicity.get(e.v, 0.0) + 1.0
            # accumulate per-node sums of neighbour rows from pre-batch H
            for l in range(self.k, 0, -1):
                acc: dict[int, np.ndarray] = {}
                for e in canon:
                    acc[e.u] = acc.get(e.u, 0.0) + H[l - 1][e.v]
                    acc[e.v] = acc.get(e.v, 0.0) + H[l - 1][e.u]
                for node in sorted(acc):
                    d, m = self.degree[node], multiplicity[node]
                    H[l][node] = (d / (d + m)) * H[l][node] + acc[node] / (d + m)
            for node in sorted(multiplicity):
                self.degree[node] += multiplicity[node]
            self.t_prev = t
        else:
            w = math.exp(self.scheme.param * t) if variant == TIME_DECAY else 1.0
            for l in range(self.k, 0, -1):
                delta: dict[int, np.ndarray] = {}
                for e in canon:
                    delta[e.u] = delta.get(e.u, 0.0) + w * H[l - 1][e.v]
                    delta[e.v] = delta.get(e.v, 0.0) + w * H[l - 1][e.u]
                for node in sorted(delta):
                    H[l][node] += delta[node]
        self.t_now = t

    def replay(self, batches):
        for b in batches:
            self.apply_batch(b)
        return self

    # -- reads -------------------------------------------------------------

    def rescaled_row(self, node: int, hop: int) -> np.ndarray:
        """Scheme-appropriate rescaling of H(hop) row at the current clock;
        the rescaled rows are the ones whose inner products estimate walk
        matrix inner products."""
        if not 0 <= hop <= self.k:
            raise HopOutOfRange(f"hop {hop} outside 0..{self.k}")
        if node >= self.capacity:
            if hop == 0:
                return seeded_row(self.seed, node, self.dim)
            return np.zeros(self.dim)
        row = self.H[hop][node].copy()
        if self.scheme.variant == TIME_DECAY and hop > 0:
            row *= math.exp(-self.scheme.param * hop * self.t_now)
        return row

    def estimate_similarity(self, u: int, w: int) -> np.ndarray:
        """Estimates of [A(0)[u,w], ..., A(k)[u,w]] via inner products of
        every layer of u against layer 0 of w."""
        base = self.rescaled_row(w, 0)
        return np.array([self.rescaled_row(u, l) @ base for l in range(self.k + 1)])

    def memory_model_bytes(self) -> int:
        """Closed-form accounting: (k+1) * n * dim * 8 bytes of reals."""
        return (self.k + 1) * self.capacity * self.dim * 8

    def allocated_bytes(self) -> int:
        total = sum(h.nbytes for h in self.H)
        if self.scheme.variant == CAWN_DECAY:
            total += self.degree.nbytes
        return total
