"""Domain types for the corpus/behavior data model."""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, field

PAD_ID = 0
UNK_ID = 1
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"


class SentimentClass(enum.Enum):
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    POSITIVE = "positive"


@dataclass(frozen=True)
class NewsItem:
    """One article with tokenized text and categorical annotations."""

    news_id: str
    title_tokens: tuple[int, ...]
    abstract_tokens: tuple[int, ...]
    category_id: int
    subcategory_id: int
    entity_ids: tuple[int, ...]
    sentiment_score: float = 0.0
    sentiment_class: SentimentClass = SentimentClass.NEUTRAL


@dataclass(frozen=True)
class Impression:
    """One logged interaction: click history plus labeled candidates."""

    impression_id: str
    user_id: int
    timestamp: int
    history: tuple[str, ...]                 # news ids, most recent last
    candidates: tuple[tuple[str, int], ...]  # (news id, label in {0, 1})

    def positives(self) -> list[str]:
        return [nid for nid, label in self.candidates if label == 1]

    def negatives(self) -> list[str]:
        return [nid for nid, label in self.candidates if label == 0]


class Vocabulary:
    """Token to id map with reserved PAD=0 and UNK=1 entries.

    In build mode unseen tokens get fresh ids; once frozen they map to
    UNK. The map is bijective over non-special entries.
    """

    def __init__(self, specials: tuple[str, str] = (PAD_TOKEN, UNK_TOKEN)):
        self._token_to_id: dict[str, int] = {specials[0]: PAD_ID, specials[1]: UNK_ID}
        self._id_to_token: dict[int, str] = {PAD_ID: specials[0], UNK_ID: specials[1]}
        self.frozen = False

    def __len__(self) -> int:
        return len(self._token_to_id)

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    def lookup(self, token: str) -> int:
        tid = self._token_to_id.get(token)
        if tid is not None:
            return tid
        if self.frozen:
            return UNK_ID
        tid = len(self._token_to_id)
        self._token_to_id[token] = tid
        self._id_to_token[tid] = token
        return tid

    def token(self, tid: int) -> str:
        return self._id_to_token[tid]

    def freeze(self) -> "Vocabulary":
        self.frozen = True
        return self

    def items(self):
        return self._token_to_id.items()

    @classmethod
    def from_items(cls, items, frozen: bool = True) -> "Vocabulary":
        v = cls()
        for token, tid in items:
            tid = int(tid)
            if tid in (PAD_ID, UNK_ID):
                continue
            v._token_to_id[token] = tid
            v._id_to_token[tid] = token
        v.frozen = frozen
        return v


@dataclass
class CorpusVocabs:
    """Vocabularies built while parsing a news corpus."""

    tokens: Vocabulary = field(default_factory=Vocabulary)
    categories: Vocabulary = field(default_factory=Vocabulary)
    subcategories: Vocabulary = field(default_factory=Vocabulary)
    entities: Vocabulary = field(default_factory=Vocabulary)

    def freeze(self) -> "CorpusVocabs":
        for v in (self.tokens, self.categories, self.subcategories, self.entities):
            v.freeze()
        return self


class UserTable:
    """Raw user id to dense id map; frozen lookups of unseen users -> COLD.

    Dense ids are assigned in first-seen order starting at 0. The COLD
    id is one past the last assigned id and owns a shared embedding row,
    so tables sized ``n_rows`` never index out of range.
    """

    def __init__(self):
        self._map: dict[str, int] = {}
        self.frozen = False

    def __len__(self) -> int:
        return len(self._map)

    def to_id(self, raw: str) -> int:
        uid = self._map.get(raw)
        if uid is not None:
            return uid
        if self.frozen:
            return self.cold_id
        uid = len(self._map)
        self._map[raw] = uid
        return uid

    @property
    def cold_id(self) -> int:
        return len(self._map)

    @property
    def n_rows(self) -> int:
        return len(self._map) + 1  # + shared COLD row

    def freeze(self) -> "UserTable":
        self.frozen = True
        return self

    def items(self):
        return self._map.items()

    @classmethod
    def from_items(cls, items, frozen: bool = True) -> "UserTable":
        t = cls()
        for raw, uid in sorted(items, key=lambda kv: int(kv[1])):
            t._map[raw] = int(uid)
        t.frozen = frozen
        return t


@dataclass
class DatasetSplit:
    """Train/validation/test impressions plus the article index."""

    train: list[Impression]
    validation: list[Impression]
    test: list[Impression]
    news_index: dict[str, NewsItem]

    def validate(self) -> None:
        """Check referential integrity: every referenced id is indexed."""
        for part in (self.train, self.validation, self.test):
            for imp in part:
                for nid in imp.history:
                    if nid not in self.news_index:
                        raise ValueError(f"impression {imp.impression_id}: unknown history id {nid}")
                for nid, _ in imp.candidates:
                    if nid not in self.news_index:
                        raise ValueError(f"impression {imp.impression_id}: unknown candidate id {nid}")


@dataclass
class RowError:
    """A rejected input row: file line number (1-based) and reason."""

    line: int
    reason: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.reason}"


_PUNCT_CACHE: dict[str, bool] = {}


def _is_punct(ch: str) -> bool:
    hit = _PUNCT_CACHE.get(ch)
    if hit is None:
        hit = unicodedata.category(ch).startswith("P")
        _PUNCT_CACHE[ch] = hit
    return hit


def tokenize(text: str) -> list[str]:
    """Lowercase, drop Unicode punctuation characters, split on whitespace."""
    cleaned = "".join(ch for ch in text.lower() if not _is_punct(ch))
    return cleaned.split()
