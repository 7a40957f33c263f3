"""Transmitter lifespan models.

A transmitter holds its position for a random lifespan and then vanishes
from the receiver's perspective (sudden displacement). A download succeeds
only if it completes within the serving transmitter's lifespan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FixedLifespan:
    mean: float

    def __post_init__(self):
        if self.mean <= 0:
            raise ValueError("lifespan must be positive")


@dataclass(frozen=True)
class ExponentialLifespan:
    """Exponential lifespan with the given mean (rate 1/mean)."""

    mean: float

    def __post_init__(self):
        if self.mean <= 0:
            raise ValueError("mean lifespan must be positive")


LifespanLaw = FixedLifespan | ExponentialLifespan


def sample_lifespan(law: LifespanLaw, rng: np.random.Generator | None = None, size=None):
    """Draw lifespans in seconds (scalar or array of `size`)."""
    rng = np.random.default_rng() if rng is None else rng
    if isinstance(law, FixedLifespan):
        return np.full(size, law.mean) if size is not None else law.mean
    if isinstance(law, ExponentialLifespan):
        return rng.exponential(law.mean, size=size)
    raise TypeError(f"unknown lifespan law {law!r}")
