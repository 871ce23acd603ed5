"""On-disk cache for prepared dataset splits.

Layout of a cache directory::

    news.bin    pickled list[NewsItem]
    train.bin   pickled list[Impression]
    val.bin     pickled list[Impression]
    test.bin    pickled list[Impression]
    vocab.tsv   token<TAB>id  (text token vocabulary)
    meta.json   format version, category/subcategory/entity/user maps, stats

The format version is checked on load; a mismatch is fatal.
"""

from __future__ import annotations

import json
import pickle
from dataclasses import dataclass
from pathlib import Path

from .types import CorpusVocabs, DatasetSplit, UserTable, Vocabulary

FORMAT_VERSION = 1


@dataclass
class Dataset:
    """A prepared split plus everything needed to size a model."""

    split: DatasetSplit
    vocabs: CorpusVocabs
    users: UserTable

    @property
    def n_tokens(self) -> int:
        return len(self.vocabs.tokens)

    @property
    def n_categories(self) -> int:
        return len(self.vocabs.categories)

    @property
    def n_entities(self) -> int:
        return len(self.vocabs.entities)


def save_dataset(dataset: Dataset, cache_dir: str | Path) -> None:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    split = dataset.split
    news = [split.news_index[k] for k in sorted(split.news_index)]
    with open(cache_dir / "news.bin", "wb") as f:
        pickle.dump(news, f, protocol=4)
    for name, part in (("train", split.train), ("val", split.validation), ("test", split.test)):
        with open(cache_dir / f"{name}.bin", "wb") as f:
            pickle.dump(part, f, protocol=4)
    with open(cache_dir / "vocab.tsv", "w", encoding="utf-8") as f:
        for token, tid in sorted(dataset.vocabs.tokens.items(), key=lambda kv: kv[1]):
            f.write(f"{token}\t{tid}\n")
    meta = {
        "format_version": FORMAT_VERSION,
        "categories": dict(dataset.vocabs.categories.items()),
        "subcategories": dict(dataset.vocabs.subcategories.items()),
        "entities": dict(dataset.vocabs.entities.items()),
        "users": dict(dataset.users.items()),
        "counts": {
            "news": len(news),
            "train": len(split.train),
            "val": len(split.validation),
            "test": len(split.test),
            "tokens": len(dataset.vocabs.tokens),
        },
    }
    with open(cache_dir / "meta.json", "w", encoding="utf-8") as f:
        json.dump(meta, f, sort_keys=True)


def load_dataset(cache_dir: str | Path) -> Dataset:
    cache_dir = Path(cache_dir)
    meta_path = cache_dir / "meta.json"
    if not meta_path.exists():
        raise FileNotFoundError(
            f"no prepared dataset at {cache_dir} (run prepare-data first)")
    with open(meta_path, "r", encoding="utf-8") as f:
        meta = json.load(f)
    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(
            f"cache format version {version} at {cache_dir} does not match "
            f"supported version {FORMAT_VERSION}; re-run prepare-data")
    with open(cache_dir / "news.bin", "rb") as f:
        news = pickle.load(f)
    parts = {}
    for name in ("train", "val", "test"):
        with open(cache_dir / f"{name}.bin", "rb") as f:
            parts[name] = pickle.load(f)
    tokens = Vocabulary()
    with open(cache_dir / "vocab.tsv", "r", encoding="utf-8") as f:
        pairs = []
        for line in f:
            line = line.rstrip("\n")
            if line:
                token, tid = line.split("\t")
                pairs.append((token, int(tid)))
    tokens = Vocabulary.from_items(pairs)
    vocabs = CorpusVocabs(
        tokens=tokens,
        categories=Vocabulary.from_items(meta["categories"].items()),
        subcategories=Vocabulary.from_items(meta["subcategories"].items()),
        entities=Vocabulary.from_items(meta["entities"].items()),
    )
    users = UserTable.from_items(meta["users"].items())
    split = DatasetSplit(
        train=parts["train"],
        validation=parts["val"],
        test=parts["test"],
        news_index={item.news_id: item for item in news},
    )
    return Dataset(split=split, vocabs=vocabs, users=users)
