"""The three data variants: raw, filtered (stop words removed), stemmed.

Stemming always applies to the filtered token stream, so the variants
form a chain: raw -> filtered -> stemmed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpus import Corpus
from .stemming import get_stemmer

VARIANTS = ("raw", "filtered", "stemmed")

_INTRA_WORD_APOSTROPHE = re.compile(r"(?<=\w)['’](?=\w)")
_TOKEN = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class TokenizedDocument:
    id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class VariantConfig:
    """Which variant to produce and with what resources.

    ``stoplist`` of None means the packaged default English list.
    ``min_token_len`` drops shorter tokens right after tokenization
    (default 1: numerals and single characters are kept).
    """

    variant: str = "raw"
    stoplist: frozenset[str] | None = None
    stemmer: str = "en-suffix"
    min_token_len: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant: {self.variant!r} (expected one of {VARIANTS})")
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")

    def effective_stoplist(self) -> frozenset[str]:
        return default_stoplist() if self.stoplist is None else self.stoplist


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric boundaries.

    Intra-word apostrophes are removed with the pieces joined, so
    "don't" becomes "dont".  Purely numeric tokens are kept.
    """
    text = _INTRA_WORD_APOSTROPHE.sub("", text.lower())
    return _TOKEN.findall(text)


def filter_stopwords(tokens: list[str], stoplist: frozenset[str]) -> list[str]:
    return [t for t in tokens if t not in stoplist]


def stem(tokens: list[str], stemmer: str = "en-suffix") -> list[str]:
    fn = get_stemmer(stemmer)
    return [fn(t) for t in tokens]


def preprocess_document(text: str, config: VariantConfig) -> list[str]:
    tokens = tokenize(text)
    if config.min_token_len > 1:
        tokens = [t for t in tokens if len(t) >= config.min_token_len]
    if config.variant in ("filtered", "stemmed"):
        tokens = filter_stopwords(tokens, config.effective_stoplist())
    if config.variant == "stemmed":
        tokens = stem(tokens, config.stemmer)
    return tokens


def preprocess_corpus(corpus: Corpus, config: VariantConfig) -> list[TokenizedDocument]:
    """Tokenize every document under the given variant, preserving order."""
    return [
        TokenizedDocument(doc.id, tuple(preprocess_document(doc.text, config)))
        for doc in corpus
    ]


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a stop word file: one word per line, '#' lines are comments."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8-sig").splitlines():
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        words.add(word.lower())
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stoplist() -> frozenset[str]:
    text = resources.files("respcluster.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return frozenset(
        w.strip().lower()
        for w in text.splitlines()
        if w.strip() and not w.startswith("#")
    )
