"""Accuracy and beyond-accuracy evaluation.

Per-impression metrics (AUC, MRR, nDCG@k) are macro-averaged over
impressions; beyond-accuracy metrics score the aspect composition of
the top-k ranked candidates. Ranked metrics break score ties by stable
candidate input order, which keeps results deterministic.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .data.types import Impression, NewsItem


def _ranking(scores: Sequence[float]) -> np.ndarray:
    """Candidate indices from best to worst, ties by input order."""
    s = np.asarray(scores, dtype=np.float64)
    return np.argsort(-s, kind="stable")


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Pairwise ranking accuracy: P(score_pos > score_neg), ties count 1/2."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    pos, neg = s[y == 1], s[y == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("auc needs at least one positive and one negative")
    # rank-sum formulation with midranks, equivalent to pair counting
    order = np.argsort(np.concatenate([pos, neg]), kind="stable")
    ranks = np.empty(len(order), dtype=np.float64)
    sorted_vals = np.concatenate([pos, neg])[order]
    i = 0
    rank = 1.0
    while i < len(sorted_vals):
        j = i
        while j + 1 < len(sorted_vals) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        mid = (rank + rank + (j - i)) / 2.0
        ranks[order[i:j + 1]] = mid
        rank += j - i + 1
        i = j + 1
    r_pos = ranks[: len(pos)].sum()
    u = r_pos - len(pos) * (len(pos) + 1) / 2.0
    return float(u / (len(pos) * len(neg)))


def mrr(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Mean reciprocal rank over all positives of the impression."""
    y = np.asarray(labels)
    if y.sum() == 0:
        raise ValueError("mrr needs at least one positive")
    order = _ranking(scores)
    rr = [1.0 / (rank + 1) for rank, idx in enumerate(order) if y[idx] == 1]
    return float(np.mean(rr))


def ndcg_at_k(scores: Sequence[float], labels: Sequence[int], k: int) -> float:
    """Binary-relevance nDCG over the top-k of the score ranking."""
    if k < 1:
        raise ValueError("k must be >= 1")
    y = np.asarray(labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise ValueError("ndcg needs at least one positive")
    order = _ranking(scores)[:k]
    dcg = sum(float(y[idx]) / math.log2(rank + 2) for rank, idx in enumerate(order))
    idcg = sum(1.0 / math.log2(rank + 2) for rank in range(min(k, n_pos)))
    return dcg / idcg


def aspect_diversity_at_k(topk_aspects: Sequence[int], n_aspect_classes: int) -> float:
    """Normalized Shannon entropy of the aspect mix in the top-k list.

    Entropy of the empirical aspect distribution divided by
    ``ln(min(k, n_aspect_classes))``; a single-aspect list scores 0 and
    a maximally mixed one scores 1. Lists of one item score 0.
    """
    if n_aspect_classes < 2:
        raise ValueError("need at least 2 aspect classes")
    k = len(topk_aspects)
    if k == 0:
        raise ValueError("empty top-k list")
    norm = math.log(min(k, n_aspect_classes))
    if norm == 0.0:
        return 0.0
    counts: dict[int, int] = {}
    for a in topk_aspects:
        counts[a] = counts.get(a, 0) + 1
    entropy = -sum((c / k) * math.log(c / k) for c in counts.values())
    return entropy / norm


def aspect_personalization_at_k(topk_aspects: Sequence[int],
                                history_aspects: Sequence[int]) -> float:
    """Generalized Jaccard between top-k and history aspect distributions."""
    if not topk_aspects or not history_aspects:
        raise ValueError("both aspect lists must be non-empty")

    def dist(xs):
        counts: dict[int, float] = {}
        for x in xs:
            counts[x] = counts.get(x, 0.0) + 1.0
        return {a: c / len(xs) for a, c in counts.items()}

    p, q = dist(topk_aspects), dist(history_aspects)
    keys = set(p) | set(q)
    min_sum = sum(min(p.get(a, 0.0), q.get(a, 0.0)) for a in keys)
    max_sum = sum(max(p.get(a, 0.0), q.get(a, 0.0)) for a in keys)
    return min_sum / max_sum


# ----------------------------------------------------------------------
# split-level evaluation

ASPECT_GETTERS: dict[str, Callable[[NewsItem], int]] = {
    "category": lambda item: item.category_id,
    "sentiment": lambda item: {"negative": 0, "neutral": 1, "positive": 2}[item.sentiment_class.value],
}

ASPECT_CLASS_COUNTS: dict[str, Callable[[dict[str, NewsItem]], int]] = {
    "category": lambda index: max(2, len({i.category_id for i in index.values()})),
    "sentiment": lambda index: 3,
}


class _Welford:
    """Single-pass mean/std accumulator (order independent up to rounding)."""

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    @property
    def std(self) -> float:
        return math.sqrt(self.m2 / self.n) if self.n else 0.0


@dataclass
class EvalReport:
    """Macro-averaged metric values with provenance metadata."""

    metrics: dict[str, dict]                      # name -> {mean, std, n}
    skipped: dict[str, int]
    metadata: dict
    per_impression: list[dict] = field(default_factory=list, repr=False)

    def to_json(self) -> str:
        return json.dumps(
            {"metrics": self.metrics, "skipped": self.skipped, "metadata": self.metadata},
            sort_keys=True, indent=2)

    def save(self, path: str | Path, spill_csv: str | Path | None = None) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")
        if spill_csv is not None:
            with open(spill_csv, "w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f)
                writer.writerow(["impression_id", "metric", "value"])
                for row in self.per_impression:
                    for name, value in row.items():
                        if name != "impression_id":
                            writer.writerow([row["impression_id"], name, value])


def evaluate_split(
    scorer: Callable[[Impression], np.ndarray],
    impressions: Iterable[Impression],
    news_index: dict[str, NewsItem],
    ks: Sequence[int] = (5, 10),
    aspects: Sequence[str] = ("category", "sentiment"),
    diversity_k: int = 10,
    metadata: dict | None = None,
    keep_per_impression: bool = False,
    personalization: bool = False,
) -> EvalReport:
    """Score every impression and macro-average the metric columns.

    ``scorer`` maps an impression to one score per candidate. Emits
    auc, mrr, ndcg@k for each k, and an aspect diversity column per
    aspect at ``diversity_k`` (plus personalization columns when
    requested). Impressions without both labels present are skipped and
    counted; evaluating nothing is fatal.
    """
    for aspect in aspects:
        if aspect not in ASPECT_GETTERS:
            raise ValueError(f"unknown aspect {aspect!r}; choose from {sorted(ASPECT_GETTERS)}")
    class_counts = {a: ASPECT_CLASS_COUNTS[a](news_index) for a in aspects}
    names = ["auc", "mrr"] + [f"ndcg@{k}" for k in ks]
    names += [f"div_{a}@{diversity_k}" for a in aspects]
    if personalization:
        names += [f"pers_{a}@{diversity_k}" for a in aspects]
    acc: dict[str, _Welford] = {n: _Welford() for n in names}
    skipped = {"single_class": 0, "empty_history": 0}
    rows: list[dict] = []

    n_seen = 0
    for imp in impressions:
        n_seen += 1
        labels = [lbl for _, lbl in imp.candidates]
        n_pos = sum(labels)
        if n_pos == 0 or n_pos == len(labels):
            skipped["single_class"] += 1
            continue
        scores = np.asarray(scorer(imp), dtype=np.float64)
        if scores.shape != (len(labels),):
            raise ValueError(
                f"scorer returned shape {scores.shape} for {len(labels)} candidates")
        if not np.isfinite(scores).all():
            raise ValueError(f"non-finite scores for impression {imp.impression_id}")
        row = {"impression_id": imp.impression_id}
        row["auc"] = auc(scores, labels)
        row["mrr"] = mrr(scores, labels)
        for k in ks:
            row[f"ndcg@{k}"] = ndcg_at_k(scores, labels, k)
        order = _ranking(scores)[:diversity_k]
        top_items = [news_index[imp.candidates[i][0]] for i in order]
        for aspect in aspects:
            getter = ASPECT_GETTERS[aspect]
            row[f"div_{aspect}@{diversity_k}"] = aspect_diversity_at_k(
                [getter(item) for item in top_items], class_counts[aspect])
        if personalization:
            hist_items = [news_index[nid] for nid in imp.history if nid in news_index]
            for aspect in aspects:
                name = f"pers_{aspect}@{diversity_k}"
                if not hist_items:
                    skipped["empty_history"] += 1
                    continue
                getter = ASPECT_GETTERS[aspect]
                row[name] = aspect_personalization_at_k(
                    [getter(i) for i in top_items], [getter(i) for i in hist_items])
        for name, value in row.items():
            if name != "impression_id":
                acc[name].add(value)
        if keep_per_impression:
            rows.append(row)

    if all(w.n == 0 for w in acc.values()):
        raise ValueError(f"all {n_seen} impressions were skipped; nothing evaluated")
    metrics = {
        name: {"mean": w.mean, "std": w.std, "n": w.n}
        for name, w in acc.items() if w.n > 0
    }
    return EvalReport(metrics=metrics, skipped=skipped,
                      metadata=dict(metadata or {}), per_impression=rows)
