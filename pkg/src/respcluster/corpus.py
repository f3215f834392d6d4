"""Answer corpora and their human classifications.

A corpus is an ordered collection of identified answers loaded from a
JSON Lines file.  Human classifications are overlapping: an answer may
carry several class labels, in which case each label gets probability
weight 1/m.  Answers with no label at all become singleton outlier
classes of their own.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

OUTLIER_PREFIX = "_outlier_"


@dataclass(frozen=True)
class Document:
    id: str
    text: str


class Corpus:
    """Ordered, uniquely identified answer documents."""

    def __init__(self, documents: Iterable[Document]):
        docs = list(documents)
        seen: set[str] = set()
        for doc in docs:
            if not doc.id:
                raise ValueError("document id must be a non-empty string")
            if doc.id in seen:
                raise ValueError(f"duplicate document id: {doc.id}")
            seen.add(doc.id)
        self.documents: list[Document] = docs
        self._by_id: dict[str, Document] = {d.id: d for d in docs}

    @property
    def n(self) -> int:
        return len(self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @property
    def ids(self) -> list[str]:
        return [d.id for d in self.documents]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def text(self, doc_id: str) -> str:
        return self._by_id[doc_id].text


def _read_jsonl(path: str | Path) -> list[tuple[int, dict]]:
    """Parse a JSONL file into (line_number, record) pairs, stripping a BOM."""
    raw = Path(path).read_text(encoding="utf-8-sig")
    records = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed JSON on line {lineno}: {exc}") from exc
        if not isinstance(obj, dict):
            raise ValueError(f"{path}: line {lineno} is not a JSON object")
        records.append((lineno, obj))
    return records


def load_corpus(path: str | Path, allow_empty: bool = False) -> Corpus:
    """Load a corpus from a JSONL file of ``{"id", "text"}`` objects.

    Line order is preserved.  Duplicate ids, malformed lines and (unless
    ``allow_empty``) empty texts are hard errors.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, obj in _read_jsonl(path):
        if "id" not in obj or "text" not in obj:
            raise ValueError(f"{path}: line {lineno} must have 'id' and 'text' fields")
        doc_id, text = obj["id"], obj["text"]
        if not isinstance(doc_id, str) or not doc_id:
            raise ValueError(f"{path}: line {lineno}: id must be a non-empty string")
        if not isinstance(text, str):
            raise ValueError(f"{path}: line {lineno}: text must be a string")
        if doc_id in seen:
            raise ValueError(f"duplicate document id: {doc_id}")
        if not text and not allow_empty:
            raise ValueError(f"{path}: line {lineno}: empty text for document {doc_id!r}")
        seen.add(doc_id)
        docs.append(Document(doc_id, text))
    return Corpus(docs)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to JSONL; inverse of :func:`load_corpus`."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(json.dumps({"id": doc.id, "text": doc.text}, ensure_ascii=False) + "\n")


class Classification:
    """Probabilistic overlapping ground-truth labels.

    ``membership`` maps each document id to a non-empty tuple of class
    labels.  A document in m classes has weight 1/m for each of them and
    0 elsewhere; the weights of one document always sum to 1.
    """

    def __init__(self, membership: Mapping[str, Iterable[str]]):
        mem: dict[str, tuple[str, ...]] = {}
        for doc_id, classes in membership.items():
            labels = tuple(classes)
            if not labels:
                raise ValueError(f"document {doc_id!r} has an empty class list")
            if len(set(labels)) != len(labels):
                raise ValueError(f"document {doc_id!r} repeats a class label")
            mem[doc_id] = labels
        self.membership: dict[str, tuple[str, ...]] = mem
        self.classes: list[str] = sorted({c for labels in mem.values() for c in labels})
        self._members: dict[str, list[str]] = {c: [] for c in self.classes}
        for doc_id, labels in mem.items():
            for c in labels:
                self._members[c].append(doc_id)

    @property
    def doc_ids(self) -> list[str]:
        return list(self.membership)

    def m(self, doc_id: str) -> int:
        """Number of classes the document belongs to."""
        return len(self.membership[doc_id])

    def weight(self, cls: str, doc_id: str) -> float:
        labels = self.membership[doc_id]
        return 1.0 / len(labels) if cls in labels else 0.0

    def weights_for(self, doc_id: str) -> dict[str, float]:
        labels = self.membership[doc_id]
        w = 1.0 / len(labels)
        return {c: w for c in labels}

    def members(self, cls: str) -> list[str]:
        return list(self._members[cls])

    def class_size(self, cls: str) -> int:
        return len(self._members[cls])

    def is_hard(self) -> bool:
        return all(len(labels) == 1 for labels in self.membership.values())

    def restrict(self, doc_ids: Iterable[str]) -> "Classification":
        """Classification over a subset of documents, weights unchanged."""
        keep = set(doc_ids)
        unknown = keep - set(self.membership)
        if unknown:
            raise ValueError(f"unknown document ids: {sorted(unknown)}")
        return Classification({d: ls for d, ls in self.membership.items() if d in keep})


def load_labels(path: str | Path, corpus: Corpus) -> Classification:
    """Load a classification from JSONL ``{"id", "classes": [...]}`` records.

    The label file must cover the corpus ids exactly.  An empty class
    list marks the answer as an outlier, which becomes a singleton class
    ``_outlier_<id>``.
    """
    membership: dict[str, list[str]] = {}
    for lineno, obj in _read_jsonl(path):
        if "id" not in obj or "classes" not in obj:
            raise ValueError(f"{path}: line {lineno} must have 'id' and 'classes' fields")
        doc_id, classes = obj["id"], obj["classes"]
        if not isinstance(classes, list) or not all(isinstance(c, str) for c in classes):
            raise ValueError(f"{path}: line {lineno}: classes must be a list of strings")
        if doc_id in membership:
            raise ValueError(f"{path}: line {lineno}: duplicate label line for id {doc_id!r}")
        if doc_id not in corpus:
            raise ValueError(f"{path}: line {lineno}: unknown document id {doc_id!r}")
        membership[doc_id] = classes if classes else [f"{OUTLIER_PREFIX}{doc_id}"]
    missing = set(corpus.ids) - set(membership)
    if missing:
        raise ValueError(f"label file is missing documents: {sorted(missing)}")
    return Classification(membership)


@dataclass(frozen=True)
class CorpusStats:
    """Summary counts for one preprocessing variant of a corpus.

    Class statistics are present only when a classification was given:
    ``n_proper_classes`` counts classes with at least two members,
    ``n_outliers`` counts singleton classes (human singletons and
    synthetic outlier classes alike), and ``n_multiclass`` counts
    documents belonging to two or more classes.
    """

    n_answers: int
    mean_tokens: float
    vocab_size: int
    n_proper_classes: int | None = None
    n_outliers: int | None = None
    n_multiclass: int | None = None


def corpus_stats(corpus, labels=None, config=None) -> CorpusStats:
    """Compute :class:`CorpusStats` on one preprocessing variant.

    ``config`` is a :class:`respcluster.preprocess.VariantConfig`; the
    default is the raw variant.
    """
    from . import preprocess

    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    if config is None:
        config = preprocess.VariantConfig(variant="raw")
    tokenized = preprocess.preprocess_corpus(corpus, config)
    total = sum(len(t.tokens) for t in tokenized)
    vocab = {tok for t in tokenized for tok in t.tokens}
    k = n_ol = n_mc = None
    if labels is not None:
        k = sum(1 for c in labels.classes if labels.class_size(c) >= 2)
        n_ol = sum(1 for c in labels.classes if labels.class_size(c) == 1)
        n_mc = sum(1 for d in labels.membership if labels.m(d) >= 2)
    return CorpusStats(
        n_answers=len(corpus),
        mean_tokens=total / len(corpus),
        vocab_size=len(vocab),
        n_proper_classes=k,
        n_outliers=n_ol,
        n_multiclass=n_mc,
    )
