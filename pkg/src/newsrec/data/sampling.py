"""Negative sampling for pointwise training."""

from __future__ import annotations

import numpy as np

from .types import Impression


def negative_sample_training(
    impression: Impression, k: int, rng_seed: int
) -> list[tuple[str, tuple[str, ...]]]:
    """Build one (positive, k negatives) tuple per clicked candidate.

    Negatives are drawn uniformly from the impression's label-0
    candidates, without replacement when at least ``k`` are available
    and with replacement otherwise. Returns an empty list when the
    impression has no negatives (callers count such skips).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    positives = impression.positives()
    if not positives:
        raise ValueError(f"impression {impression.impression_id} has no positive candidate")
    negatives = impression.negatives()
    if not negatives:
        return []
    rng = np.random.default_rng(rng_seed)
    pool = np.array(negatives, dtype=object)
    out = []
    for pos in positives:
        replace = len(negatives) < k
        chosen = rng.choice(pool, size=k, replace=replace)
        out.append((pos, tuple(str(c) for c in chosen)))
    return out
