import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsrec.data import Impression, NewsItem, SentimentClass
from newsrec.metrics import (
    aspect_diversity_at_k,
    aspect_personalization_at_k,
    auc,
    evaluate_split,
    mrr,
    ndcg_at_k,
)


# ----------------------------------------------------------------------
# brute-force oracles (independent of the implementations under test)

def auc_oracle(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = correct = 0.0
    for p in pos:
        for n in neg:
            total += 1
            if p > n:
                correct += 1
            elif p == n:
                correct += 0.5
    return correct / total


def rank_order_oracle(scores):
    # best first; ties by input order, derived by a full stable sort
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def mrr_oracle(scores, labels):
    order = rank_order_oracle(scores)
    rrs = [1.0 / (r + 1) for r, i in enumerate(order) if labels[i] == 1]
    return sum(rrs) / len(rrs)


def ndcg_oracle(scores, labels, k):
    order = rank_order_oracle(scores)
    dcg = sum(labels[i] / math.log2(r + 2) for r, i in enumerate(order[:k]))
    ideal = sorted(labels, reverse=True)
    idcg = sum(rel / math.log2(r + 2) for r, rel in enumerate(ideal[:k]))
    return dcg / idcg


# ----------------------------------------------------------------------
# spec examples

def test_auc_perfect_and_tied():
    assert auc([0.9, 0.2], [1, 0]) == 1.0
    assert auc([0.5, 0.5], [1, 0]) == 0.5


def test_auc_hand_enumerated_case():
    # pairs: (0.9 vs 0.8 ok), (0.9 vs 0.1 ok), (0.3 vs 0.8 wrong), (0.3 vs 0.1 ok)
    assert auc([0.9, 0.8, 0.3, 0.1], [1, 0, 1, 0]) == 0.75


def test_auc_single_class_fatal():
    with pytest.raises(ValueError):
        auc([0.1, 0.2], [1, 1])


def test_mrr_cases():
    assert mrr([0.9, 0.1, 0.2], [1, 0, 0]) == 1.0
    assert mrr([0.1, 0.5, 0.9, 0.8, 0.7], [0, 0, 0, 0, 1]) == pytest.approx(1 / 3)
    # positives at ranks 1 and 4
    assert mrr([0.9, 0.8, 0.7, 0.6], [1, 0, 0, 1]) == pytest.approx(0.625)


def test_ndcg_cases():
    assert ndcg_at_k([0.9, 0.5, 0.1], [1, 1, 0], k=3) == 1.0
    # relevance by rank [1, 0, 1], k=3: DCG = 1 + 0.5, IDCG = 1 + 1/log2(3)
    expected = 1.5 / (1.0 + 1.0 / math.log2(3))
    assert ndcg_at_k([0.9, 0.5, 0.1], [1, 0, 1], k=3) == pytest.approx(expected)
    assert expected == pytest.approx(0.9197, abs=1e-4)
    assert ndcg_at_k([0.9, 0.5, 0.1], [1, 0, 1], k=1) == 1.0


def test_diversity_cases():
    assert aspect_diversity_at_k([3, 3, 3, 3], 5) == 0.0
    assert aspect_diversity_at_k(list(range(10)), 10) == pytest.approx(1.0)
    # counts [2, 1, 1] over >= 4 classes -> 0.75 exactly
    assert aspect_diversity_at_k([0, 0, 1, 2], 6) == pytest.approx(0.75)


def test_personalization_cases():
    assert aspect_personalization_at_k([1, 2], [2, 1]) == 1.0
    assert aspect_personalization_at_k([1, 1], [2, 3]) == 0.0
    # p = [1/2, 1/2, 0], q = [1/2, 0, 1/2] -> 0.5 / 1.5
    assert aspect_personalization_at_k([0, 1], [0, 2]) == pytest.approx(1 / 3)


# ----------------------------------------------------------------------
# oracle equivalence on random impressions

def test_oracle_equivalence_random_cases():
    rng = np.random.default_rng(123)
    for _ in range(500):
        m = int(rng.integers(2, 21))
        labels = np.zeros(m, dtype=int)
        labels[rng.choice(m, size=int(rng.integers(1, m)), replace=False)] = 1
        if labels.sum() == m:
            labels[0] = 0
        scores = np.round(rng.standard_normal(m), 2)  # rounding forces ties
        ls = labels.tolist()
        ss = scores.tolist()
        assert auc(ss, ls) == pytest.approx(auc_oracle(ss, ls), abs=1e-9)
        assert mrr(ss, ls) == pytest.approx(mrr_oracle(ss, ls), abs=1e-9)
        for k in (1, 5, 10):
            assert ndcg_at_k(ss, ls, k) == pytest.approx(ndcg_oracle(ss, ls, k), abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5, allow_nan=False),
                          st.integers(0, 1)), min_size=2, max_size=15))
def test_monotone_transform_invariance(pairs):
    # snap scores to a coarse grid so the float transform stays strictly
    # increasing on distinct values
    scores = [round(s * 64) / 64 for s, _ in pairs]
    labels = [l for _, l in pairs]
    if sum(labels) in (0, len(labels)):
        return
    transformed = [math.exp(0.5 * s) + 3.0 for s in scores]
    assert auc(scores, labels) == pytest.approx(auc(transformed, labels), abs=1e-12)
    assert mrr(scores, labels) == pytest.approx(mrr(transformed, labels), abs=1e-12)
    for k in (1, 3, 10):
        assert ndcg_at_k(scores, labels, k) == pytest.approx(
            ndcg_at_k(transformed, labels, k), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5, allow_nan=False),
                          st.integers(0, 1)), min_size=2, max_size=15))
def test_ndcg_bounded_and_non_decreasing_past_n_pos(pairs):
    # with the truncated-ideal normalizer, ndcg@k can dip while k < the
    # positive count (the ideal grows faster than the achieved list);
    # from k = n_pos on, the ideal is fixed and monotonicity holds
    scores = [s for s, _ in pairs]
    labels = [l for _, l in pairs]
    n_pos = sum(labels)
    if n_pos in (0, len(labels)):
        return
    values = [ndcg_at_k(scores, labels, k) for k in range(1, len(scores) + 2)]
    assert all(0.0 <= v <= 1.0 + 1e-12 for v in values)
    tail = values[n_pos - 1:]
    assert all(b >= a - 1e-12 for a, b in zip(tail, tail[1:]))


# ----------------------------------------------------------------------
# evaluate_split

def make_eval_fixture(n_impressions=200, m=10, seed=0, n_pos=2):
    rng = np.random.default_rng(seed)
    classes = list(SentimentClass)
    news_index = {}
    for i in range(60):
        news_index[f"S{i}"] = NewsItem(
            f"S{i}", (2,), (), int(rng.integers(2, 6)), 2, (),
            sentiment_class=classes[int(rng.integers(0, 3))])
    imps = []
    for i in range(n_impressions):
        cand_ids = rng.choice(60, size=m, replace=False)
        labels = np.zeros(m, dtype=int)
        labels[rng.choice(m, size=n_pos, replace=False)] = 1
        imps.append(Impression(
            f"I{i}", 0, 100 + i,
            tuple(f"S{j}" for j in rng.choice(60, size=3, replace=False)),
            tuple((f"S{j}", int(l)) for j, l in zip(cand_ids, labels))))
    return imps, news_index


def test_evaluate_split_oracle_scorer_is_perfect():
    # single positive per impression: a label-copying scorer is exactly 1.0
    imps, news_index = make_eval_fixture(n_pos=1)
    report = evaluate_split(
        lambda imp: np.array([lbl for _, lbl in imp.candidates], dtype=float),
        imps, news_index)
    assert report.metrics["auc"]["mean"] == 1.0
    assert report.metrics["mrr"]["mean"] == 1.0
    assert report.metrics["ndcg@5"]["mean"] == 1.0
    assert report.metrics["ndcg@10"]["mean"] == 1.0
    assert report.metrics["auc"]["n"] == len(imps)


def test_evaluate_split_multi_positive_oracle_scorer():
    # multi-positive convention: AUC and nDCG stay 1.0, MRR averages
    # reciprocal ranks over all positives (here ranks 1 and 2 -> 0.75)
    imps, news_index = make_eval_fixture(n_pos=2)
    report = evaluate_split(
        lambda imp: np.array([lbl for _, lbl in imp.candidates], dtype=float),
        imps, news_index)
    assert report.metrics["auc"]["mean"] == 1.0
    assert report.metrics["ndcg@10"]["mean"] == 1.0
    assert report.metrics["mrr"]["mean"] == pytest.approx(0.75)


def test_evaluate_split_random_scorer_near_half():
    imps, news_index = make_eval_fixture(n_impressions=1000)
    rng = np.random.default_rng(7)
    report = evaluate_split(lambda imp: rng.standard_normal(len(imp.candidates)),
                            imps, news_index)
    assert abs(report.metrics["auc"]["mean"] - 0.5) < 0.05


def test_evaluate_split_emits_six_default_columns():
    imps, news_index = make_eval_fixture(n_impressions=50)
    report = evaluate_split(
        lambda imp: np.arange(len(imp.candidates), dtype=float), imps, news_index)
    assert set(report.metrics) == {
        "auc", "mrr", "ndcg@5", "ndcg@10", "div_category@10", "div_sentiment@10"}


def test_evaluate_split_personalization_and_spill(tmp_path):
    imps, news_index = make_eval_fixture(n_impressions=20)
    report = evaluate_split(
        lambda imp: np.arange(len(imp.candidates), dtype=float), imps, news_index,
        personalization=True, keep_per_impression=True)
    assert "pers_category@10" in report.metrics
    out = tmp_path / "report.json"
    spill = tmp_path / "per_impression.csv"
    report.save(out, spill_csv=spill)
    assert out.exists()
    header = spill.read_text().splitlines()[0]
    assert header == "impression_id,metric,value"


def test_evaluate_split_all_skipped_fatal():
    imps, news_index = make_eval_fixture(n_impressions=5)
    bad = [Impression(i.impression_id, 0, i.timestamp, i.history,
                      tuple((nid, 1) for nid, _ in i.candidates)) for i in imps]
    with pytest.raises(ValueError, match="skipped"):
        evaluate_split(lambda imp: np.zeros(len(imp.candidates)), bad, news_index)


def test_evaluate_split_skips_single_class_and_counts():
    imps, news_index = make_eval_fixture(n_impressions=10)
    bad = Impression("bad", 0, 1, (), tuple((nid, 1) for nid, _ in imps[0].candidates))
    report = evaluate_split(lambda imp: np.zeros(len(imp.candidates)),
                            imps + [bad], news_index)
    assert report.skipped["single_class"] == 1
    assert report.metrics["auc"]["n"] == 10
