"""Exact ground-truth computation of temporal walk matrices.

Everything here works by summing walk scores directly from the walk
definition: a walk is a node-time sequence with strictly decreasing
timestamps whose consecutive nodes share an event at the later node's
entry time.  The hop-0 matrix is the identity at all times.

Intended for desk-scale validation only (n up to a few hundred, a few
thousand events); a configurable cap aborts enumeration on instances that
are too large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemeMismatch, WalkExplosion
from .schemes import CAWN_DECAY, TIME_DECAY, UNIFORM_COUNT, ScoreScheme

DEFAULT_WALK_CAP = 10**7


@dataclass(frozen=True)
class TemporalWalk:
    """Steps [(w0, t0), ..., (wl, tl)] with t0 the query time and t strictly
    decreasing along the walk."""

    steps: tuple[tuple[int, float], ...]

    def __len__(self) -> int:
        return len(self.steps) - 1  # number of hops

    @property
    def start(self) -> int:
        return self.steps[0][0]

    @property
    def end(self) -> int:
        return self.steps[-1][0]


@dataclass
class WalkMatrixSet:
    """Dense exact matrices A(0..k) at query time t (t-plus semantics)."""

    k: int
    n: int
    t: float
    scheme: ScoreScheme
    A: list[np.ndarray] = field(repr=False)

    def entry_vector(self, u: int, w: int) -> np.ndarray:
        return np.array([self.A[l][u, w] for l in range(self.k + 1)])


def _adjacency(events, n):
    """Per-node chronological list of (t, neighbor) incidences."""
    adj = {i: [] for i in range(n)}
    for e in events:
        if e.u >= n or e.v >= n:
            raise ValueError(f"node id {max(e.u, e.v)} out of range (n={n})")
        adj[e.u].append((e.t, e.v))
        adj[e.v].append((e.t, e.u))
    return adj


class WalkOracle:
    """Memoized bottom-up walk scorer for one event stream.

    The memo is keyed by (node, sitting-time, hops-remaining) and holds the
    query-time-independent part of the walk scores, so matrices can be
    queried cheaply at many timestamps.  The time-decay factorization used
    is: score = exp(-lam*l*t) * prod_i exp(lam*t_i).
    """

    def __init__(self, events, scheme: ScoreScheme, k: int, n: int,
                 cap: int = DEFAULT_WALK_CAP):
        self.events = list(events)
        self.scheme = scheme
        self.k = k
        self.n = n
        self.cap = cap
        self.adj = _adjacency(self.events, n)
        self._memo: dict = {}
        self._count_memo: dict = {}
        self._denom_memo: dict = {}

    # -- internals ---------------------------------------------------------

    def _denominator(self, node: int, ts: float, inclusive: bool) -> float:
        key = (node, ts, inclusive)
        if key not in self._denom_memo:
            alpha = self.scheme.param
            total = 0.0
            for t_e, _ in self.adj[node]:
                if t_e < ts or (inclusive and t_e == ts):
                    total += math.exp(-alpha * (ts - t_e))
            self._denom_memo[key] = total
        return self._denom_memo[key]

    def _tail(self, node: int, ts: float, hops: int) -> np.ndarray:
        """Summed tail scores over hops-step walks from node, steps < ts."""
        if hops == 0:
            row = np.zeros(self.n)
            row[node] = 1.0
            return row
        key = (node, ts, hops)
        if key in self._memo:
            return self._memo[key]
        row = np.zeros(self.n)
        variant, p = self.scheme.variant, self.scheme.param
        if variant == CAWN_DECAY:
            denom = self._denominator(node, ts, inclusive=False)
        for t_e, other in self.adj[node]:
            if t_e >= ts:
                continue
            if variant == TIME_DECAY:
                w = math.exp(p * t_e)
            elif variant == UNIFORM_COUNT:
                w = 1.0
            else:
                w = math.exp(-p * (ts - t_e)) / denom
            row = row + w * self._tail(other, t_e, hops - 1)
        self._memo[key] = row
        return row

    def _tail_count(self, node: int, ts: float, hops: int) -> int:
        if hops == 0:
            return 1
        key = (node, ts, hops)
        if key in self._count_memo:
            return self._count_memo[key]
        total = 0
        for t_e, other in self.adj[node]:
            if t_e < ts:
                total += self._tail_count(other, t_e, hops - 1)
        self._count_memo[key] = total
        return total

    def _first_steps(self, u: int, t: float, inclusive: bool):
        return [(t_e, other) for t_e, other in self.adj[u]
                if t_e < t or (inclusive and t_e == t)]

    def _check_cap(self, t: float, inclusive: bool):
        total = 0
        for u in range(self.n):
            for l in range(1, self.k + 1):
                for t_e, other in self._first_steps(u, t, inclusive):
                    total += self._tail_count(other, t_e, l - 1)
                    if total > self.cap:
                        raise WalkExplosion(total, self.cap)

    # -- queries -----------------------------------------------------------

    def walk_count(self, t: float, inclusive: bool = True) -> int:
        """Total number of 1..k-hop walks over all source nodes at t."""
        total = 0
        for u in range(self.n):
            for l in range(1, self.k + 1):
                for t_e, other in self._first_steps(u, t, inclusive):
                    total += self._tail_count(other, t_e, l - 1)
        return total

    def row(self, u: int, hop: int, t: float, inclusive: bool = True) -> np.ndarray:
        """Row u of A(hop) at query time t (t-plus if inclusive)."""
        if hop == 0:
            row = np.zeros(self.n)
            row[u] = 1.0
            return row
        variant, p = self.scheme.variant, self.scheme.param
        row = np.zeros(self.n)
        if variant == CAWN_DECAY:
            denom = self._denominator(u, t, inclusive)
            if denom == 0.0:
                return row
        for t_e, other in self._first_steps(u, t, inclusive):
            if variant == TIME_DECAY:
                w = math.exp(p * t_e)
            elif variant == UNIFORM_COUNT:
                w = 1.0
            else:
                w = math.exp(-p * (t - t_e)) / denom
            row = row + w * self._tail(other, t_e, hop - 1)
        if variant == TIME_DECAY:
            row = math.exp(-p * hop * t) * row
        return row

    def matrices(self, t: float | None = None, inclusive: bool = True) -> WalkMatrixSet:
        if t is None:
            t = self.events[-1].t if self.events else 0.0
        self._check_cap(t, inclusive)
        A = [np.eye(self.n)]
        for l in range(1, self.k + 1):
            A.append(np.stack([self.row(u, l, t, inclusive) for u in range(self.n)]))
        return WalkMatrixSet(k=self.k, n=self.n, t=t, scheme=self.scheme, A=A)

    def score_walk(self, walk: TemporalWalk, inclusive: bool = True) -> float:
        """Score one explicit walk under this oracle's scheme.

        The first hop sits at the walk's query time t0; deeper hops sit at
        the event time through which the walk arrived.
        """
        steps = walk.steps
        t_query = steps[0][1]
        score = 1.0
        variant, p = self.scheme.variant, self.scheme.param
        for i in range(len(steps) - 1):
            node_i, t_i = steps[i]
            t_next = steps[i + 1][1]
            if variant == TIME_DECAY:
                score *= math.exp(-p * (t_query - t_next))
            elif variant == CAWN_DECAY:
                denom = self._denominator(node_i, t_i, inclusive and i == 0)
                score *= math.exp(-p * (t_i - t_next)) / denom
        return score


def exact_matrices(events, scheme: ScoreScheme, k: int, n: int,
                   t: float | None = None, inclusive: bool = True,
                   cap: int = DEFAULT_WALK_CAP) -> WalkMatrixSet:
    """Exact A(0..k) at time t (default: right after the last event)."""
    return WalkOracle(events, scheme, k, n, cap=cap).matrices(t, inclusive)


def enumerate_walks(events, u: int, max_len: int, t: float,
                    inclusive: bool = False,
                    cap: int = DEFAULT_WALK_CAP) -> list[TemporalWalk]:
    """Every temporal walk of 0..max_len hops starting at u, by DFS.

    Uses events strictly before t unless inclusive is set (then events at
    exactly t may serve as the first hop).  The 0-hop walk [(u, t)] is
    always present.
    """
    n = max((max(e.u, e.v) for e in events), default=u) + 1
    n = max(n, u + 1)
    adj = _adjacency(events, n)
    walks: list[TemporalWalk] = []

    def extend(prefix, hops_left, first):
        walks.append(TemporalWalk(tuple(prefix)))
        if len(walks) > cap:
            raise WalkExplosion(len(walks), cap)
        if hops_left == 0:
            return
        node, ts = prefix[-1]
        for t_e, other in adj[node]:
            if t_e < ts or (first and inclusive and t_e == ts):
                prefix.append((other, t_e))
                extend(prefix, hops_left - 1, False)
                prefix.pop()

    extend([(u, t)], max_len, True)
    return walks


# -- similarity features ---------------------------------------------------


def _require(ms: WalkMatrixSet, variant: str, method: str):
    if ms.scheme.variant != variant:
        raise SchemeMismatch(
            f"{method} needs {variant} matrices, got {ms.scheme.variant}"
        )


def similarity_dygformer(ms: WalkMatrixSet, u: int, w: int) -> np.ndarray:
    """Number of direct links between u and w before t: [A(1)[u,w]]."""
    _require(ms, UNIFORM_COUNT, "similarity_dygformer")
    return np.array([ms.A[1][u, w]])


def similarity_pint(ms: WalkMatrixSet, u: int, w: int) -> np.ndarray:
    """Walk counts per hop: [A(0)[u,w], ..., A(k)[u,w]]."""
    _require(ms, UNIFORM_COUNT, "similarity_pint")
    return ms.entry_vector(u, w)


def similarity_nat(ms: WalkMatrixSet, u: int, w: int) -> np.ndarray:
    """Prefix reachability bits: entry j is 1 iff some walk of <= j hops
    reaches w from u."""
    _require(ms, UNIFORM_COUNT, "similarity_nat")
    return (np.cumsum(ms.entry_vector(u, w)) > 0).astype(float)


def similarity_cawn(ms: WalkMatrixSet, u: int, w: int) -> np.ndarray:
    """Per-hop visit probabilities under the causal sampling scheme."""
    _require(ms, CAWN_DECAY, "similarity_cawn")
    return ms.entry_vector(u, w)


# -- Monte-Carlo cross-check ----------------------------------------------


def sample_walk_visits(events, u: int, t: float, alpha: float, k: int, n: int,
                       n_samples: int, seed: int = 0,
                       inclusive: bool = True) -> np.ndarray:
    """Visit frequencies from sampled causal walks, a (k+1) x n matrix.

    Entry (l, w) is the fraction of sampled walks whose l-th visited node
    is w.  Each step moves to an incident earlier event with probability
    proportional to exp(-alpha * elapsed); a node with no earlier events
    terminates the walk.  Converges to the causal-decay walk matrix rows.
    """
    adj = _adjacency(events, n)
    rng = np.random.default_rng(seed)
    # (node, sitting-time) -> (neighbors array, cumulative probabilities)
    choice_cache: dict = {}

    def choices(node, ts, first):
        key = (node, ts, first)
        if key not in choice_cache:
            cand = [(t_e, o) for t_e, o in adj[node]
                    if t_e < ts or (first and inclusive and t_e == ts)]
            if cand:
                weights = np.array([math.exp(-alpha * (ts - t_e)) for t_e, _ in cand])
                cum = np.cumsum(weights / weights.sum())
                choice_cache[key] = (cand, cum)
            else:
                choice_cache[key] = (None, None)
        return choice_cache[key]

    freq = np.zeros((k + 1, n))
    draws = rng.random((n_samples, k))
    for s in range(n_samples):
        node, ts = u, t
        freq[0, node] += 1
        for step in range(1, k + 1):
            cand, cum = choices(node, ts, first=(step == 1))
            if cand is None:
                break
            idx = int(np.searchsorted(cum, draws[s, step - 1]))
            ts, node = cand[idx]
            freq[step, node] += 1
    return freq / n_samples


def write_matrices_csv(ms: WalkMatrixSet, directory, prefix="walk_matrix"):
    """Debug export: one dense row-major CSV file per hop matrix."""
    import pathlib

    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for l, mat in enumerate(ms.A):
        path = directory / f"{prefix}_{l}.csv"
        np.savetxt(path, mat, delimiter=",")
        paths.append(path)
    return paths
