"""Walk-weighting schemes.

A scheme fixes the score a temporal walk contributes to the walk matrix:
exponential time decay (rate lam), uniform counting, or the normalized
sampling probability used by causal walk extraction (rate alpha).
"""

from __future__ import annotations

from dataclasses import dataclass

TIME_DECAY = "decay"
UNIFORM_COUNT = "count"
CAWN_DECAY = "cawn"


@dataclass(frozen=True)
class ScoreScheme:
    variant: str
    param: float = 0.0  # lam for decay, alpha for cawn, unused for count

    def __post_init__(self):
        if self.variant not in (TIME_DECAY, UNIFORM_COUNT, CAWN_DECAY):
            raise ValueError(f"unknown scheme variant {self.variant!r}")
        if self.variant == TIME_DECAY and self.param < 0:
            raise ValueError("decay rate must be >= 0")
        if self.variant == CAWN_DECAY and self.param <= 0:
            raise ValueError("alpha must be > 0")


def time_decay(lam: float) -> ScoreScheme:
    return ScoreScheme(TIME_DECAY, lam)


def uniform_count() -> ScoreScheme:
    return ScoreScheme(UNIFORM_COUNT)


def cawn_decay(alpha: float) -> ScoreScheme:
    return ScoreScheme(CAWN_DECAY, alpha)
