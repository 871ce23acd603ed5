"""Temporal splitting and history truncation."""

from __future__ import annotations

import dataclasses
import math

from .types import DatasetSplit, Impression, NewsItem


def temporal_split(
    impressions: list[Impression],
    val_fraction: float,
    news_index: dict[str, NewsItem] | None = None,
    test: list[Impression] | None = None,
) -> DatasetSplit:
    """Split impressions into temporally disjoint train and validation.

    Impressions sort by timestamp (stable); the last ceil(val_fraction*N)
    go to validation, and every impression tied with the boundary
    timestamp moves to validation too, so max(train ts) < min(val ts)
    always holds. A test list and news index may be attached verbatim.
    """
    if not impressions:
        raise ValueError("cannot split an empty impression list")
    if not 0.0 < val_fraction < 1.0:
        raise ValueError(f"val_fraction must be in (0, 1), got {val_fraction}")
    ordered = sorted(impressions, key=lambda i: i.timestamp)
    if ordered[0].timestamp == ordered[-1].timestamp:
        raise ValueError("all timestamps equal: no temporal order exists")
    n_val = math.ceil(val_fraction * len(ordered))
    boundary = ordered[-n_val].timestamp
    cut = len(ordered) - n_val
    while cut > 0 and ordered[cut - 1].timestamp == boundary:
        cut -= 1
    train, validation = ordered[:cut], ordered[cut:]
    if not train:
        raise ValueError("validation fraction leaves no training impressions after tie handling")
    return DatasetSplit(
        train=train,
        validation=validation,
        test=list(test) if test is not None else [],
        news_index=dict(news_index) if news_index is not None else {},
    )


def truncate_history(impression: Impression, max_history: int) -> Impression:
    """Keep the most recent ``max_history`` clicks (history is oldest first)."""
    if max_history < 0:
        raise ValueError("max_history must be >= 0")
    if len(impression.history) <= max_history:
        return impression
    return dataclasses.replace(impression, history=impression.history[-max_history:])


def truncate_split(split: DatasetSplit, max_history: int) -> DatasetSplit:
    return DatasetSplit(
        train=[truncate_history(i, max_history) for i in split.train],
        validation=[truncate_history(i, max_history) for i in split.validation],
        test=[truncate_history(i, max_history) for i in split.test],
        news_index=split.news_index,
    )
