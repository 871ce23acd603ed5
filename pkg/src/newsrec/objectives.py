"""Training losses: listwise cross-entropy, supervised contrastive, their
weighted dual, and the topic / sentiment auxiliary terms.

All losses are scalars built on the autodiff tensors with numerically
stable log-sum-exp, so they are differentiable end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn.tensor import Tensor, log_softmax, softmax, tmean, tsum


@dataclass
class LossConfig:
    """Which objective to train with and its weights.

    ``kind`` selects cross-entropy over sampled negatives ("ce"),
    supervised contrastive over full impressions ("scl"), or their
    weighted average ("dual" with weight ``dual_weight`` on the
    contrastive side). ``aux`` adds a topic-classification or
    sentiment-diversity term.
    """

    kind: str = "ce"                    # ce | scl | dual
    temperature: float = 0.1            # scl/dual
    dual_weight: float = 0.5            # dual: (1-w)*ce + w*scl
    aux: str = "none"                   # none | topic | sentiment
    aux_topic_weight: float = 0.2       # multiplier on the topic term
    aux_sent_pred_weight: float = 0.4   # mu: sentiment prediction MSE
    aux_sent_div_weight: float = 0.4    # hinge on same-sign sentiment

    def validate(self) -> None:
        if self.kind not in ("ce", "scl", "dual"):
            raise ValueError(f"loss kind must be ce|scl|dual, got {self.kind!r}")
        if self.aux not in ("none", "topic", "sentiment"):
            raise ValueError(f"aux must be none|topic|sentiment, got {self.aux!r}")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if not 0.0 <= self.dual_weight <= 1.0:
            raise ValueError("dual_weight must be in [0, 1]")
        for name in ("aux_topic_weight", "aux_sent_pred_weight", "aux_sent_div_weight"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative")


def ce_loss(scores: Tensor, positive_index: int = 0) -> Tensor:
    """Negative log softmax probability of the positive among 1+K scores."""
    if not np.isfinite(scores.data).all():
        raise ValueError("non-finite scores in ce_loss")
    if scores.ndim != 1 or scores.shape[0] < 2:
        raise ValueError("ce_loss expects a 1-d score vector with >= 2 entries")
    onehot = np.zeros(scores.shape[0], dtype=scores.dtype)
    onehot[positive_index] = 1.0
    return -tsum(log_softmax(scores) * onehot)


def scl_loss(scores: Tensor, labels: np.ndarray, temperature: float) -> Tensor:
    """Supervised contrastive loss over one impression's candidate scores.

    Positives are pulled above all candidates in temperature-scaled
    score space: mean over positives i of -log softmax(s/tau)[i], with
    the softmax running over every candidate of the impression.
    """
    labels = np.asarray(labels).astype(bool)
    if labels.ndim != 1 or labels.shape[0] != scores.shape[0]:
        raise ValueError("labels must align with scores")
    if not labels.any() or labels.all():
        raise ValueError("scl_loss needs at least one positive and one negative")
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    logp = log_softmax(scores * (1.0 / temperature))
    picked = logp * labels.astype(scores.dtype)
    return -tsum(picked) * (1.0 / labels.sum())


def dual_loss(ce: Tensor, scl: Tensor, weight: float) -> Tensor:
    """Weighted average: (1-weight)*ce + weight*scl."""
    if not 0.0 <= weight <= 1.0:
        raise ValueError("dual weight must lie in [0, 1]")
    return ce * (1.0 - weight) + scl * weight


def topic_loss(topic_logits: Tensor, true_category: int) -> Tensor:
    """Softmax cross-entropy of the category head for one article."""
    n_cat = topic_logits.shape[-1]
    if not 0 <= true_category < n_cat:
        raise ValueError(f"category {true_category} out of range [0, {n_cat})")
    onehot = np.zeros(n_cat, dtype=topic_logits.dtype)
    onehot[true_category] = 1.0
    return -tsum(log_softmax(topic_logits) * onehot)


def sentiment_loss(
    predicted: Tensor,
    true_scores: np.ndarray,
    rec_scores: Tensor,
    cand_sentiments: np.ndarray,
    hist_mean_sentiment: float,
    pred_weight: float,
    div_weight: float,
) -> Tensor:
    """Sentiment prediction plus diversity regularization.

    ``pred_weight * mean((predicted - true)^2)`` trains a sentiment head
    on the batch articles, and ``div_weight * sum_i softmax(rec)_i *
    max(0, cand_sent_i * hist_mean)`` pushes down recommendation scores
    of candidates whose sentiment sign matches the history mean.
    """
    true_scores = np.asarray(true_scores, dtype=predicted.dtype)
    cand_sentiments = np.asarray(cand_sentiments, dtype=rec_scores.dtype)
    if np.abs(cand_sentiments).max(initial=0.0) > 1.0 or abs(hist_mean_sentiment) > 1.0:
        raise ValueError("sentiment values must lie in [-1, 1]")
    pred_term = tmean((predicted - true_scores) ** 2)
    hinge = np.maximum(0.0, cand_sentiments * float(hist_mean_sentiment))
    div_term = tsum(softmax(rec_scores) * hinge)
    return pred_term * pred_weight + div_term * div_weight
