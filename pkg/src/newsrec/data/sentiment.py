"""Rule-based lexicon sentiment scoring.

A valence lexicon maps tokens to signed strengths; the compound score
of a token list is

    clamp( sum(v) / (alpha * sqrt(n_matched) + sum(|v|)), -1, 1 )

with normalization constant ``alpha = 15``, classified positive at
>= 0.05 and negative at <= -0.05. Lexicons are TSV files of
``token<TAB>valence``; a small built-in English lexicon ships with the
package for corpora without one.
"""

from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

from .types import SentimentClass

ALPHA = 15.0
POSITIVE_THRESHOLD = 0.05
NEGATIVE_THRESHOLD = -0.05


def annotate_sentiment(text_tokens: list[str], lexicon: dict[str, float]) -> tuple[float, SentimentClass]:
    """Score raw tokens against a valence lexicon.

    Tokens missing from the lexicon are ignored; no matches yield
    ``(0.0, neutral)``. The score is odd under lexicon negation.
    """
    if not lexicon:
        raise ValueError("sentiment lexicon is empty")
    valences = [lexicon[t] for t in text_tokens if t in lexicon]
    if not valences:
        return 0.0, SentimentClass.NEUTRAL
    total = sum(valences)
    norm = ALPHA * math.sqrt(len(valences)) + sum(abs(v) for v in valences)
    score = max(-1.0, min(1.0, total / norm))
    if score >= POSITIVE_THRESHOLD:
        return score, SentimentClass.POSITIVE
    if score <= NEGATIVE_THRESHOLD:
        return score, SentimentClass.NEGATIVE
    return score, SentimentClass.NEUTRAL


def load_lexicon(path: str | Path) -> dict[str, float]:
    """Read a token<TAB>valence TSV; later duplicates win."""
    lexicon: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"lexicon {path} line {ln}: expected 2 tab-separated fields")
            try:
                lexicon[parts[0]] = float(parts[1])
            except ValueError as e:
                raise ValueError(f"lexicon {path} line {ln}: bad valence {parts[1]!r}") from e
    if not lexicon:
        raise ValueError(f"lexicon {path} is empty")
    return lexicon


def builtin_lexicon() -> dict[str, float]:
    """Small bundled English valence list."""
    ref = resources.files("newsrec").joinpath("resources/sentiment_lexicon.tsv")
    lexicon: dict[str, float] = {}
    for line in ref.read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        token, valence = line.split("\t")
        lexicon[token] = float(valence)
    return lexicon
