"""Corpus and behavior data model, parsing, splitting, annotation."""

from .types import (
    PAD_ID,
    UNK_ID,
    CorpusVocabs,
    DatasetSplit,
    Impression,
    NewsItem,
    RowError,
    SentimentClass,
    UserTable,
    Vocabulary,
    tokenize,
)
from .sentiment import annotate_sentiment, builtin_lexicon, load_lexicon
from .mind import parse_mind_behaviors, parse_mind_news
from .adressa import build_adressa_impressions, parse_adressa_events
from .splits import temporal_split, truncate_history, truncate_split
from .sampling import negative_sample_training
from .cache import Dataset, load_dataset, save_dataset

__all__ = [
    "PAD_ID",
    "UNK_ID",
    "CorpusVocabs",
    "Dataset",
    "DatasetSplit",
    "Impression",
    "NewsItem",
    "RowError",
    "SentimentClass",
    "UserTable",
    "Vocabulary",
    "annotate_sentiment",
    "build_adressa_impressions",
    "builtin_lexicon",
    "load_dataset",
    "load_lexicon",
    "negative_sample_training",
    "parse_adressa_events",
    "parse_mind_behaviors",
    "parse_mind_news",
    "save_dataset",
    "temporal_split",
    "tokenize",
    "truncate_history",
    "truncate_split",
]
