"""Deterministic pairwise features for a node pair.

Stacks the rescaled rows of both endpoints into a 2(k+1) x dim matrix
(row order: u hops 0..k, then v hops 0..k), forms its Gram matrix,
flattens it row-major, and applies the log(ReLU(x)+1) scaling.  The
learned transformation consuming these vectors is out of scope here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .sketch import SketchState


@dataclass(frozen=True)
class PairwiseFeature:
    u: int
    v: int
    t_now: float
    raw: np.ndarray     # length 4(k+1)^2, flattened Gram matrix
    scaled: np.ndarray  # log(max(raw, 0) + 1)


def stack_features(state: SketchState, u: int, v: int) -> np.ndarray:
    """The 2(k+1) x dim stack of rescaled rows of u then v."""
    rows = [state.rescaled_row(u, l) for l in range(state.k + 1)]
    rows += [state.rescaled_row(v, l) for l in range(state.k + 1)]
    return np.stack(rows)


def raw_pairwise(state: SketchState, u: int, v: int) -> np.ndarray:
    """Row-major flattening of the Gram matrix of the stacked rows."""
    F = stack_features(state, u, v)
    return (F @ F.T).reshape(-1)


def scale_pairwise(raw: np.ndarray) -> np.ndarray:
    """Elementwise log(max(x, 0) + 1); clamps the negatives that can only
    arise from estimation noise, then compresses the dynamic range."""
    return np.log1p(np.maximum(raw, 0.0))


def pairwise_feature(state: SketchState, u: int, v: int) -> PairwiseFeature:
    raw = raw_pairwise(state, u, v)
    return PairwiseFeature(u=u, v=v, t_now=state.t_now, raw=raw,
                           scaled=scale_pairwise(raw))


def to_json_record(feature: PairwiseFeature) -> str:
    return json.dumps({
        "u": feature.u,
        "v": feature.v,
        "t_now": feature.t_now,
        "raw": feature.raw.tolist(),
        "scaled": feature.scaled.tolist(),
    })


def to_csv_row(feature: PairwiseFeature) -> str:
    cells = [str(feature.u), str(feature.v), repr(feature.t_now)]
    cells += [repr(x) for x in feature.raw]
    cells += [repr(x) for x in feature.scaled]
    return ",".join(cells)
