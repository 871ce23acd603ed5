"""Adressa-style event logs: positives only, negatives sampled from the corpus."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .types import Impression, NewsItem, RowError, UserTable

logger = logging.getLogger(__name__)


def parse_adressa_events(path: str | Path) -> tuple[list[tuple[str, str, int]], list[RowError]]:
    """Read click events from JSON-lines with fields userId, id, time."""
    events: list[tuple[str, str, int]] = []
    errors: list[RowError] = []
    with open(path, "r", encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                events.append((str(obj["userId"]), str(obj["id"]), int(obj["time"])))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                errors.append(RowError(ln, "malformed event record"))
    if errors:
        logger.warning("%s: rejected %d event rows (first: %s)", Path(path).name, len(errors), errors[0])
    return events, errors


def build_adressa_impressions(
    events: list[tuple[str, str, int]],
    news_index: dict[str, NewsItem],
    negatives_per_click: int,
    rng_seed: int,
    users: UserTable | None = None,
) -> tuple[list[Impression], UserTable]:
    """Turn (user, news, time) click events into labeled impressions.

    Each click becomes one impression whose candidates are the clicked
    article (label 1, listed first) plus ``negatives_per_click``
    articles sampled uniformly without replacement from the corpus,
    excluding everything the user ever clicked. History holds the
    user's strictly earlier clicks in time order. Deterministic for a
    fixed seed.
    """
    if negatives_per_click < 1:
        raise ValueError("negatives_per_click must be >= 1")
    if len(news_index) <= negatives_per_click:
        raise ValueError(
            f"corpus has {len(news_index)} articles; need more than "
            f"{negatives_per_click} to sample negatives")
    if users is None:
        users = UserTable()
    all_ids = np.array(sorted(news_index), dtype=object)
    id_pos = {nid: i for i, nid in enumerate(all_ids)}

    by_user: dict[str, list[tuple[int, int, str]]] = {}
    for order, (user, nid, ts) in enumerate(events):
        if nid not in news_index:
            continue
        by_user.setdefault(user, []).append((ts, order, nid))

    rng = np.random.default_rng(rng_seed)
    impressions: list[Impression] = []
    counter = 0
    for user in by_user:  # first-seen order (dict preserves insertion)
        clicks = sorted(by_user[user])  # by time, input order breaking ties
        clicked_set = {nid for _, _, nid in clicks}
        pool_mask = np.ones(len(all_ids), dtype=bool)
        for nid in clicked_set:
            pool_mask[id_pos[nid]] = False
        pool = all_ids[pool_mask]
        if len(pool) < negatives_per_click:
            raise ValueError(
                f"user {user!r} clicked {len(clicked_set)} of {len(all_ids)} articles; "
                f"pool too small for {negatives_per_click} negatives")
        uid = users.to_id(user)
        history: list[str] = []
        for ts, _, nid in clicks:
            negs = rng.choice(pool, size=negatives_per_click, replace=False)
            candidates = [(nid, 1)] + [(str(n), 0) for n in negs]
            counter += 1
            impressions.append(Impression(
                impression_id=f"A{counter}",
                user_id=uid,
                timestamp=ts,
                history=tuple(history),
                candidates=tuple(candidates),
            ))
            history.append(nid)
    return impressions, users
