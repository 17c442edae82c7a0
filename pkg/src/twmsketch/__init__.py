"""Streaming random-projection sketches of temporal walk matrices.

Four pieces: a validated event-stream front end, an exact walk-matrix
oracle for desk-scale validation, the incremental sketch engine, and a
pairwise-feature decoder.  The `twm` CLI drives replay, comparison,
dimension sweeps, and synthetic benchmarks.
"""

from .events import (
    EventBatch,
    InteractionEvent,
    batch_by_timestamp,
    normalize_times,
    parse_stream,
    serialize_stream,
)
from .oracle import (
    TemporalWalk,
    WalkMatrixSet,
    WalkOracle,
    enumerate_walks,
    exact_matrices,
    sample_walk_visits,
    similarity_cawn,
    similarity_dygformer,
    similarity_nat,
    similarity_pint,
)
from .pairwise import (
    PairwiseFeature,
    pairwise_feature,
    raw_pairwise,
    scale_pairwise,
    stack_features,
)
from .schemes import ScoreScheme, cawn_decay, time_decay, uniform_count
from .sketch import SketchState, projection_matrix, seeded_row
from .snapshot import restore, snapshot

__all__ = [
    "EventBatch",
    "InteractionEvent",
    "PairwiseFeature",
    "ScoreScheme",
    "SketchState",
    "TemporalWalk",
    "WalkMatrixSet",
    "WalkOracle",
    "batch_by_timestamp",
    "cawn_decay",
    "enumerate_walks",
    "exact_matrices",
    "normalize_times",
    "pairwise_feature",
    "parse_stream",
    "projection_matrix",
    "raw_pairwise",
    "restore",
    "sample_walk_visits",
    "scale_pairwise",
    "seeded_row",
    "serialize_stream",
    "similarity_cawn",
    "similarity_dygformer",
    "similarity_nat",
    "similarity_pint",
    "snapshot",
    "stack_features",
    "time_decay",
    "uniform_count",
]
