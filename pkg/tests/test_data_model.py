import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsrec.data import (
    CorpusVocabs,
    Impression,
    SentimentClass,
    UserTable,
    annotate_sentiment,
    negative_sample_training,
    parse_mind_behaviors,
    parse_mind_news,
    temporal_split,
    tokenize,
    truncate_history,
)

NEWS_ROW = "{nid}\t{cat}\t{sub}\t{title}\t{abstract}\thttp://x\t{tents}\t{aents}"


def write_news(tmp_path, rows, name="news.tsv"):
    p = tmp_path / name
    p.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return p


def news_row(nid, cat="sports", sub="nba", title="Best NBA moments",
             abstract="", tents="[]", aents="[]"):
    return NEWS_ROW.format(nid=nid, cat=cat, sub=sub, title=title,
                           abstract=abstract, tents=tents, aents=aents)


# ----------------------------------------------------------------------
# tokenizer / news parsing

def test_tokenize_lowercase_punct_whitespace():
    assert tokenize("Best NBA moments") == ["best", "nba", "moments"]
    assert tokenize("Hello, World!  It's U.S.") == ["hello", "world", "its", "us"]


def test_parse_news_basic_row(tmp_path):
    p = write_news(tmp_path, [news_row("N1")])
    items, vocabs, errors = parse_mind_news(p)
    assert not errors
    assert len(items) == 1
    assert len(items[0].title_tokens) == 3
    assert all(t >= 2 for t in items[0].title_tokens)  # non-special ids


def test_parse_news_empty_title_rejected(tmp_path):
    p = write_news(tmp_path, [news_row("N1"), news_row("N2", title="..."), news_row("N3")])
    items, _, errors = parse_mind_news(p)
    assert [i.news_id for i in items] == ["N1", "N3"]
    assert len(errors) == 1 and errors[0].line == 2


def test_parse_news_bad_column_count(tmp_path):
    p = tmp_path / "news.tsv"
    p.write_text(news_row("N1") + "\nN2\tonly\tthree\n", encoding="utf-8")
    items, _, errors = parse_mind_news(p)
    assert len(items) == 1
    assert errors and errors[0].line == 2


def test_parse_news_five_rows_two_categories(tmp_path):
    # hand-built fixture: 5 rows over exactly 2 categories
    rows = [
        news_row("N1", cat="sports", title="lakers win big"),
        news_row("N2", cat="finance", title="markets rally today"),
        news_row("N3", cat="sports", title="injury update for star"),
        news_row("N4", cat="finance", title="rates hold steady"),
        news_row("N5", cat="sports", title="transfer window news"),
    ]
    items, vocabs, errors = parse_mind_news(write_news(tmp_path, rows))
    assert not errors and len(items) == 5
    assert len({i.category_id for i in items}) == 2


def test_parse_news_entities_and_frozen_vocab(tmp_path):
    tents = json.dumps([{"WikidataId": "Q1"}, {"WikidataId": "Q2"}])
    p = write_news(tmp_path, [news_row("N1", tents=tents, title="alpha beta")])
    items, vocabs, _ = parse_mind_news(p)
    assert len(items[0].entity_ids) == 2
    vocabs.freeze()
    p2 = write_news(tmp_path, [news_row("N9", title="alpha gamma")], name="news2.tsv")
    items2, _, _ = parse_mind_news(p2, vocabs)
    alpha_id = items[0].title_tokens[0]
    assert items2[0].title_tokens[0] == alpha_id
    assert items2[0].title_tokens[1] == 1  # unseen token -> UNK


def test_parse_news_unreadable_file_fatal(tmp_path):
    with pytest.raises(OSError):
        parse_mind_news(tmp_path / "missing.tsv")


# ----------------------------------------------------------------------
# behaviors parsing

def behaviors_row(imp_id, user, ts, history, cands):
    return f"{imp_id}\t{user}\t{ts}\t{history}\t{cands}"


def test_parse_behaviors_labels_and_history(tmp_path):
    p = tmp_path / "behaviors.tsv"
    p.write_text(behaviors_row("1", "U1", 100, "N1 N2", "N1-1 N2-0 N3-0") + "\n",
                 encoding="utf-8")
    imps, users, errors = parse_mind_behaviors(p)
    assert not errors
    assert imps[0].candidates == (("N1", 1), ("N2", 0), ("N3", 0))
    assert imps[0].history == ("N1", "N2")


def test_parse_behaviors_empty_history_kept(tmp_path):
    p = tmp_path / "behaviors.tsv"
    p.write_text(behaviors_row("1", "U1", 100, "", "N1-1") + "\n", encoding="utf-8")
    imps, _, errors = parse_mind_behaviors(p)
    assert not errors
    assert imps[0].history == ()


def test_parse_behaviors_bad_suffix_rejected(tmp_path):
    p = tmp_path / "behaviors.tsv"
    p.write_text(
        behaviors_row("1", "U1", 100, "", "N1-1") + "\n"
        + behaviors_row("2", "U2", 101, "", "N1-1 N2") + "\n",
        encoding="utf-8")
    imps, _, errors = parse_mind_behaviors(p)
    assert len(imps) == 1
    assert errors[0].line == 2


def test_parse_behaviors_densifies_users(tmp_path):
    # fixture: 10 rows over 4 users
    raw_users = ["U7", "U3", "U7", "U9", "U3", "U1", "U7", "U9", "U1", "U3"]
    rows = [behaviors_row(str(i), u, 100 + i, "", "N1-1 N2-0")
            for i, u in enumerate(raw_users)]
    p = tmp_path / "behaviors.tsv"
    p.write_text("\n".join(rows) + "\n", encoding="utf-8")
    imps, users, errors = parse_mind_behaviors(p)
    assert not errors and len(imps) == 10
    ids = {i.user_id for i in imps}
    assert ids == {0, 1, 2, 3}
    assert len(users) == 4


def test_parse_behaviors_mind_time_format(tmp_path):
    p = tmp_path / "behaviors.tsv"
    p.write_text(behaviors_row("1", "U1", "11/15/2019 8:55:22 AM", "", "N1-0 N2-1") + "\n",
                 encoding="utf-8")
    imps, _, errors = parse_mind_behaviors(p)
    assert not errors
    assert imps[0].timestamp > 1_500_000_000


def test_frozen_user_table_maps_unseen_to_cold():
    users = UserTable()
    assert users.to_id("A") == 0 and users.to_id("B") == 1
    users.freeze()
    assert users.to_id("C") == users.cold_id == 2
    assert users.n_rows == 3


# ----------------------------------------------------------------------
# sentiment

def test_sentiment_empty_tokens_neutral():
    score, cls = annotate_sentiment([], {"good": 1.9})
    assert score == 0.0 and cls is SentimentClass.NEUTRAL


def test_sentiment_single_positive_word():
    # frozen from the formula oracle: 1.9 / (15*sqrt(1) + 1.9)
    score, cls = annotate_sentiment(["good"], {"good": 1.9})
    assert score == pytest.approx(0.11242603550295859, abs=1e-15)
    assert cls is SentimentClass.POSITIVE


def test_sentiment_sign_symmetry_two_words():
    # frozen from the formula oracle: -3.8 / (15*sqrt(2) + 3.8)
    score, cls = annotate_sentiment(["bad", "bad"], {"bad": -1.9})
    assert score == pytest.approx(-0.15191976548642303, abs=1e-15)
    assert cls is SentimentClass.NEGATIVE
    pos_score, _ = annotate_sentiment(["good", "good"], {"good": 1.9})
    assert pos_score == -score


def test_sentiment_no_match_neutral():
    score, cls = annotate_sentiment(["xyz"], {"good": 1.9})
    assert score == 0.0 and cls is SentimentClass.NEUTRAL


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["up", "down", "flat", "spin"]), max_size=8),
       st.dictionaries(st.sampled_from(["up", "down", "flat", "spin"]),
                       st.floats(-4, 4, allow_nan=False), min_size=1))
def test_sentiment_odd_under_lexicon_negation(tokens, lexicon):
    s1, _ = annotate_sentiment(tokens, lexicon)
    s2, _ = annotate_sentiment(tokens, {k: -v for k, v in lexicon.items()})
    assert s1 == pytest.approx(-s2, abs=1e-12)


# ----------------------------------------------------------------------
# temporal split

def imp(i, ts, user=0, cands=(("N1", 1), ("N2", 0))):
    return Impression(str(i), user, ts, (), tuple(cands))


def test_temporal_split_basic():
    imps = [imp(i, ts) for i, ts in enumerate([5, 1, 9, 3, 7, 2, 8, 4, 6, 10])]
    split = temporal_split(imps, 0.2)
    assert len(split.train) == 8 and len(split.validation) == 2
    assert max(i.timestamp for i in split.train) < min(i.timestamp for i in split.validation)


def test_temporal_split_boundary_ties_go_to_validation():
    imps = [imp(i, ts) for i, ts in enumerate([1, 1, 1, 2, 2, 2])]
    split = temporal_split(imps, 0.5)
    assert sorted(i.timestamp for i in split.train) == [1, 1, 1]
    assert sorted(i.timestamp for i in split.validation) == [2, 2, 2]


def test_temporal_split_single_impression_fatal():
    with pytest.raises(ValueError):
        temporal_split([imp(0, 5)], 0.5)


def test_temporal_split_all_equal_timestamps_fatal():
    with pytest.raises(ValueError, match="temporal"):
        temporal_split([imp(i, 7) for i in range(4)], 0.25)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 50), min_size=2, max_size=40),
       st.floats(0.05, 0.95))
def test_temporal_split_disjointness_property(tss, frac):
    imps = [imp(i, ts) for i, ts in enumerate(tss)]
    try:
        split = temporal_split(imps, frac)
    except ValueError:
        return  # degenerate: all equal or empty train
    assert len(split.train) + len(split.validation) == len(imps)
    assert max(i.timestamp for i in split.train) < min(i.timestamp for i in split.validation)


def test_truncate_history_keeps_most_recent():
    i = Impression("x", 0, 1, tuple(f"N{k}" for k in range(10)), (("N1", 1),))
    out = truncate_history(i, 4)
    assert out.history == ("N6", "N7", "N8", "N9")


# ----------------------------------------------------------------------
# negative sampling

def test_negative_sampling_exhaustive_case():
    i = Impression("x", 0, 1, (), (("P", 1), ("A", 0), ("B", 0), ("C", 0), ("D", 0)))
    tuples = negative_sample_training(i, k=4, rng_seed=0)
    assert len(tuples) == 1
    pos, negs = tuples[0]
    assert pos == "P" and sorted(negs) == ["A", "B", "C", "D"]


def test_negative_sampling_two_positives():
    cands = [("P1", 1), ("P2", 1)] + [(f"N{j}", 0) for j in range(10)]
    i = Impression("x", 0, 1, (), tuple(cands))
    tuples = negative_sample_training(i, k=4, rng_seed=3)
    assert [p for p, _ in tuples] == ["P1", "P2"]
    for _, negs in tuples:
        assert len(negs) == 4 and len(set(negs)) == 4


def test_negative_sampling_with_replacement_when_short():
    i = Impression("x", 0, 1, (), (("P", 1), ("A", 0), ("B", 0)))
    for seed in range(100):
        tuples = negative_sample_training(i, k=4, rng_seed=seed)
        (_, negs), = tuples
        assert len(negs) == 4
        assert set(negs) <= {"A", "B"}


def test_negative_sampling_deterministic():
    cands = [("P", 1)] + [(f"N{j}", 0) for j in range(50)]
    i = Impression("x", 0, 1, (), tuple(cands))
    a = negative_sample_training(i, 4, rng_seed=42)
    b = negative_sample_training(i, 4, rng_seed=42)
    assert a == b


def test_negative_sampling_no_negatives_skipped():
    i = Impression("x", 0, 1, (), (("P", 1),))
    assert negative_sample_training(i, 4, rng_seed=0) == []
