"""Shared agent types and seeding helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SOURCE_POLICY = "policy"
SOURCE_TUTOR_FRESH = "tutor_fresh"
SOURCE_TUTOR_REUSED = "tutor_reused"
SOURCE_RANDOM_FALLBACK = "random_fallback"


@dataclass(frozen=True)
class ActionDecision:
    action: int
    source: str
    log_prob: float | None = None  # actor-critic only, for the executed action
    value: float | None = None  # actor-critic only


def split_seed(seed: int, n: int) -> list[int]:
    """Independent child seeds derived reproducibly from one master seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n, np.uint64)]


class EmptyRollout(Exception):
    pass


class BufferTooSmall(Exception):
    pass
