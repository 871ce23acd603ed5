"""Synthetic corpora and behavior logs with controllable structure.

Writes MIND-format ``news.tsv`` and ``behaviors.tsv`` files (plus a
matching sentiment lexicon) whose click signal is recoverable by a
content-based model:

* each topic owns a disjoint block of the vocabulary and every article
  samples its title tokens from its topic's block;
* each user draws a Dirichlet topic preference; a candidate of topic t
  is clicked with probability ``preference[t]``, then labels flip with
  probability ``click_noise``;
* articles carry one sentiment marker token (positive or negative,
  skewed by ``sentiment_skew``) that the bundled lexicon scores.

Generation is single threaded and byte deterministic for a fixed seed.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

CANDIDATES_PER_IMPRESSION = 20
IMPRESSIONS_PER_USER = 12
SENT_POSITIVE_TOKEN = "upbeatmarker"
SENT_NEGATIVE_TOKEN = "gloomymarker"
SENT_VALENCE = 3.0


@dataclass
class SynthSpec:
    """Knobs of the generator; defaults give a strongly learnable corpus."""

    n_users: int = 200
    n_news: int = 1000
    n_topics: int = 5
    vocab_size: int = 400
    tokens_per_title: int = 8
    affinity_concentration: float = 0.05
    click_noise: float = 0.0
    sentiment_skew: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_topics > self.n_news:
            raise ValueError(f"n_topics ({self.n_topics}) exceeds n_news ({self.n_news})")
        if self.n_topics < 1 or self.n_users < 1:
            raise ValueError("n_users and n_topics must be >= 1")
        if not 0.0 <= self.click_noise <= 1.0:
            raise ValueError(f"click_noise must be in [0, 1], got {self.click_noise}")
        if not -1.0 <= self.sentiment_skew <= 1.0:
            raise ValueError(f"sentiment_skew must be in [-1, 1], got {self.sentiment_skew}")
        if self.affinity_concentration <= 0:
            raise ValueError("affinity_concentration must be > 0")
        if self.vocab_size < self.n_topics:
            raise ValueError("vocab_size must cover at least one token per topic")
        if self.vocab_size <= self.n_topics * self.tokens_per_title:
            logger.warning(
                "vocab_size %d <= n_topics*tokens_per_title %d: topic blocks are thin",
                self.vocab_size, self.n_topics * self.tokens_per_title)

    @classmethod
    def from_json(cls, path: str | Path) -> "SynthSpec":
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown synth spec fields: {sorted(unknown)}")
        return cls(**raw)


def generate(spec: SynthSpec, out_dir: str | Path) -> tuple[Path, Path, Path]:
    """Write news.tsv, behaviors.tsv and sentiment_lexicon.tsv under out_dir.

    Returns the three paths. Output parses with the MIND parsers with
    zero row errors.
    """
    spec.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)

    block = spec.vocab_size // spec.n_topics
    vocab = [f"w{i:05d}" for i in range(spec.vocab_size)]

    # --- news corpus: topic-blocked titles plus one sentiment marker
    topics = rng.integers(0, spec.n_topics, size=spec.n_news)
    # guarantee every topic owns at least one article
    topics[: spec.n_topics] = np.arange(spec.n_topics)
    p_positive = (1.0 + spec.sentiment_skew) / 2.0
    sentiments = rng.random(spec.n_news) < p_positive
    news_ids = [f"S{i:05d}" for i in range(spec.n_news)]
    news_lines = []
    for i in range(spec.n_news):
        t = int(topics[i])
        lo = t * block
        hi = (t + 1) * block if t < spec.n_topics - 1 else spec.vocab_size
        ids = rng.integers(lo, hi, size=spec.tokens_per_title)
        words = [vocab[j] for j in ids]
        words.append(SENT_POSITIVE_TOKEN if sentiments[i] else SENT_NEGATIVE_TOKEN)
        title = " ".join(words)
        news_lines.append(
            f"{news_ids[i]}\ttopic{t}\ttopic{t}sub\t{title}\t\thttp://synthetic\t[]\t[]")

    news_path = out_dir / "news.tsv"
    news_path.write_text("\n".join(news_lines) + "\n", encoding="utf-8")

    # --- user preferences
    prefs = rng.dirichlet(np.full(spec.n_topics, spec.affinity_concentration),
                          size=spec.n_users)

    # --- behaviors: per user, IMPRESSIONS_PER_USER rounds over global time
    behaviors = []
    counter = 0
    clock = 1_000_000
    for round_idx in range(IMPRESSIONS_PER_USER):
        for u in range(spec.n_users):
            cand_idx = rng.choice(spec.n_news, size=CANDIDATES_PER_IMPRESSION, replace=False)
            labels = _label_candidates(rng, prefs[u], topics[cand_idx], spec.click_noise)
            if labels.sum() == 0 or labels.sum() == len(labels):
                # single-class impressions are useless for training and
                # ranking; dropping them keeps the click model exact
                continue
            counter += 1
            clock += 1
            behaviors.append((counter, u, clock, cand_idx, labels))

    user_histories: dict[int, list[str]] = {u: [] for u in range(spec.n_users)}
    lines = []
    for counter, u, ts, cand_idx, labels in behaviors:
        history = " ".join(user_histories[u])
        cands = " ".join(f"{news_ids[j]}-{int(lbl)}" for j, lbl in zip(cand_idx, labels))
        lines.append(f"I{counter:06d}\tU{u:05d}\t{ts}\t{history}\t{cands}")
        for j, lbl in zip(cand_idx, labels):
            if lbl:
                user_histories[u].append(news_ids[j])

    behaviors_path = out_dir / "behaviors.tsv"
    behaviors_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    lexicon_path = out_dir / "sentiment_lexicon.tsv"
    lexicon_path.write_text(
        f"{SENT_POSITIVE_TOKEN}\t{SENT_VALENCE}\n{SENT_NEGATIVE_TOKEN}\t{-SENT_VALENCE}\n",
        encoding="utf-8")
    return news_path, behaviors_path, lexicon_path


def _label_candidates(rng: np.random.Generator, pref: np.ndarray,
                      cand_topics: np.ndarray, noise: float) -> np.ndarray:
    clicks = rng.random(len(cand_topics)) < pref[cand_topics]
    if noise > 0:
        flips = rng.random(len(cand_topics)) < noise
        clicks = np.where(flips, ~clicks, clicks)
    return clicks.astype(np.int64)
