"""Parsers for MIND-format news and behaviors TSV files.

News file columns: news_id, category, subcategory, title, abstract,
url, title_entities, abstract_entities, where the entity columns are
JSON arrays of objects carrying "WikidataId" keys.

Behaviors file columns: impression_id, user_id, time,
history (space-separated news ids), impressions (space-separated
"newsid-label" with label 0 or 1). The time field is either integer
epoch seconds or MIND's "%m/%d/%Y %I:%M:%S %p" timestamp.
"""

from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from pathlib import Path

from .sentiment import annotate_sentiment
from .types import (
    CorpusVocabs,
    Impression,
    NewsItem,
    RowError,
    SentimentClass,
    UserTable,
    tokenize,
)

logger = logging.getLogger(__name__)

NEWS_COLUMNS = 8
BEHAVIORS_COLUMNS = 5


def _parse_entities(raw: str, vocabs: CorpusVocabs) -> list[int]:
    raw = raw.strip()
    if not raw:
        return []
    entities = json.loads(raw)
    ids = []
    for ent in entities:
        wikidata_id = ent.get("WikidataId")
        if wikidata_id:
            ids.append(vocabs.entities.lookup(wikidata_id))
    return ids


def parse_mind_news(
    path: str | Path,
    vocabs: CorpusVocabs | None = None,
    lexicon: dict[str, float] | None = None,
) -> tuple[list[NewsItem], CorpusVocabs, list[RowError]]:
    """Parse a news TSV into NewsItems plus the vocabularies used.

    With ``vocabs=None`` new vocabularies are built; passing frozen
    vocabularies maps unseen tokens to UNK. Rows with a wrong column
    count, an empty title after tokenization, or malformed entity JSON
    are rejected and reported with their line number; an unreadable
    file raises.
    """
    path = Path(path)
    if vocabs is None:
        vocabs = CorpusVocabs()
    items: list[NewsItem] = []
    errors: list[RowError] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != NEWS_COLUMNS:
                errors.append(RowError(ln, f"expected {NEWS_COLUMNS} columns, got {len(cols)}"))
                continue
            news_id, category, subcategory, title, abstract, _url, t_ents, a_ents = cols
            if news_id in seen:
                continue
            title_words = tokenize(title)
            if not title_words:
                errors.append(RowError(ln, "empty title after tokenization"))
                continue
            try:
                entity_ids = _parse_entities(t_ents, vocabs) + _parse_entities(a_ents, vocabs)
            except (json.JSONDecodeError, AttributeError, TypeError):
                errors.append(RowError(ln, "malformed entity JSON"))
                continue
            abstract_words = tokenize(abstract)
            if lexicon is None:
                score, sclass = 0.0, SentimentClass.NEUTRAL
            else:
                score, sclass = annotate_sentiment(title_words + abstract_words, lexicon)
            items.append(NewsItem(
                news_id=news_id,
                title_tokens=tuple(vocabs.tokens.lookup(w) for w in title_words),
                abstract_tokens=tuple(vocabs.tokens.lookup(w) for w in abstract_words),
                category_id=vocabs.categories.lookup(category),
                subcategory_id=vocabs.subcategories.lookup(subcategory),
                entity_ids=tuple(entity_ids),
                sentiment_score=score,
                sentiment_class=sclass,
            ))
            seen.add(news_id)
    if errors:
        logger.warning("%s: rejected %d news rows (first: %s)", path.name, len(errors), errors[0])
    return items, vocabs, errors


def _parse_time(raw: str) -> int:
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        pass
    dt = datetime.strptime(raw, "%m/%d/%Y %I:%M:%S %p")
    return int(dt.replace(tzinfo=timezone.utc).timestamp())


def parse_mind_behaviors(
    path: str | Path,
    users: UserTable | None = None,
) -> tuple[list[Impression], UserTable, list[RowError]]:
    """Parse a behaviors TSV into Impressions with densified user ids.

    User ids densify in first-seen order when ``users`` is unfrozen (or
    None); a frozen table maps unseen users to its COLD id. History
    order is preserved (most recent last); an empty history field keeps
    the impression with an empty history. Candidate tokens must end in
    "-0" or "-1"; otherwise the row is rejected with its line number.
    """
    path = Path(path)
    if users is None:
        users = UserTable()
    impressions: list[Impression] = []
    errors: list[RowError] = []
    with open(path, "r", encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != BEHAVIORS_COLUMNS:
                errors.append(RowError(ln, f"expected {BEHAVIORS_COLUMNS} columns, got {len(cols)}"))
                continue
            imp_id, user_raw, time_raw, history_raw, cands_raw = cols
            try:
                ts = _parse_time(time_raw)
            except ValueError:
                errors.append(RowError(ln, f"unparseable time {time_raw!r}"))
                continue
            candidates: list[tuple[str, int]] = []
            bad = None
            for token in cands_raw.split():
                nid, sep, label = token.rpartition("-")
                if not sep or label not in ("0", "1") or not nid:
                    bad = token
                    break
                candidates.append((nid, int(label)))
            if bad is not None:
                errors.append(RowError(ln, f"candidate {bad!r} lacks -0/-1 suffix"))
                continue
            if not candidates:
                errors.append(RowError(ln, "empty candidate list"))
                continue
            impressions.append(Impression(
                impression_id=imp_id,
                user_id=users.to_id(user_raw),
                timestamp=ts,
                history=tuple(history_raw.split()),
                candidates=tuple(candidates),
            ))
    if errors:
        logger.warning("%s: rejected %d behavior rows (first: %s)", path.name, len(errors), errors[0])
    return impressions, users, errors
