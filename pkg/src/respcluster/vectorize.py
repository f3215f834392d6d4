"""Unit-normalized tf-idf vectors and cosine similarity matrices.

Weights use the smoothed idf ln((1+N)/(1+df)) + 1 with raw term counts,
then each document vector is scaled to unit L2 norm.  Documents whose
tokens all fall outside the vocabulary get a zero vector and are listed
in ``empty_docs``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .preprocess import TokenizedDocument


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    df: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._index

    def index(self, term: str) -> int:
        return self._index[term]


def build_vocabulary(
    docs: Sequence[TokenizedDocument], min_df: int = 1, max_df: int | None = None
) -> Vocabulary:
    """Collect terms with document frequency in [min_df, max_df], sorted."""
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df: dict[str, int] = {}
    for doc in docs:
        for term in set(doc.tokens):
            df[term] = df.get(term, 0) + 1
    if not df:
        raise ValueError("all documents are empty; nothing to vectorize")
    keep = {
        t: n for t, n in df.items() if n >= min_df and (max_df is None or n <= max_df)
    }
    return Vocabulary(terms=tuple(sorted(keep)), df=keep)


class DocumentVectors:
    """Sparse per-document tf-idf vectors over a shared vocabulary."""

    def __init__(
        self,
        vocab: Vocabulary,
        doc_ids: Sequence[str],
        vectors: Sequence[Mapping[int, float]],
        empty_docs: frozenset[str],
    ):
        self.vocab = vocab
        self.doc_ids: tuple[str, ...] = tuple(doc_ids)
        self.vectors: list[dict[int, float]] = [dict(v) for v in vectors]
        self.empty_docs = empty_docs
        self._by_id = {d: i for i, d in enumerate(self.doc_ids)}

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def vector(self, doc_id: str) -> dict[int, float]:
        return self.vectors[self._by_id[doc_id]]

    def nonempty_ids(self) -> list[str]:
        return [d for d in self.doc_ids if d not in self.empty_docs]

    def dense(self, doc_ids: Sequence[str] | None = None) -> np.ndarray:
        """Rows in the given id order (default: all docs, input order)."""
        ids = self.doc_ids if doc_ids is None else tuple(doc_ids)
        out = np.zeros((len(ids), len(self.vocab)))
        for row, doc_id in enumerate(ids):
            for col, w in self.vectors[self._by_id[doc_id]].items():
                out[row, col] = w
        return out


def tfidf_vectors(docs: Sequence[TokenizedDocument], vocab: Vocabulary) -> DocumentVectors:
    """Build unit-normalized tf-idf vectors for the given documents."""
    n = len(docs)
    idf = {t: math.log((1 + n) / (1 + vocab.df[t])) + 1.0 for t in vocab.terms}
    vectors: list[dict[int, float]] = []
    empty: set[str] = set()
    for doc in docs:
        counts: dict[str, int] = {}
        for tok in doc.tokens:
            if tok in vocab:
                counts[tok] = counts.get(tok, 0) + 1
        if not counts:
            empty.add(doc.id)
            vectors.append({})
            continue
        weights = {vocab.index(t): c * idf[t] for t, c in counts.items()}
        norm = math.sqrt(sum(w * w for w in weights.values()))
        vectors.append({i: w / norm for i, w in weights.items()})
    return DocumentVectors(vocab, [d.id for d in docs], vectors, frozenset(empty))


def cosine_similarity(u: Mapping[int, float], v: Mapping[int, float]) -> float:
    """Cosine of two sparse vectors; 0 if either is the zero vector."""
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v[i] for i, w in u.items() if i in v)
    return dot / (nu * nv)


@dataclass(frozen=True)
class SimilarityMatrix:
    doc_ids: tuple[str, ...]
    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.doc_ids)

    def __post_init__(self):
        if self.values.shape != (self.n, self.n):
            raise ValueError("similarity matrix shape does not match document count")


def similarity_matrix(vectors: DocumentVectors) -> SimilarityMatrix:
    """Dense cosine similarity over all documents.

    Exactly symmetric (each pair computed once); diagonal is 1 for
    non-empty documents and 0 for empty ones.
    """
    x = vectors.dense()
    s = x @ x.T
    np.clip(s, 0.0, 1.0, out=s)
    s = np.triu(s, 1)
    s = s + s.T
    for i, doc_id in enumerate(vectors.doc_ids):
        s[i, i] = 0.0 if doc_id in vectors.empty_docs else 1.0
    return SimilarityMatrix(vectors.doc_ids, s)


def export_json(vectors: DocumentVectors, similarity: SimilarityMatrix | None = None) -> str:
    """Debug export of vectors (and optionally the similarity matrix)."""
    terms = list(vectors.vocab.terms)
    payload: dict = {
        "terms": terms,
        "vectors": {
            doc_id: {terms[i]: w for i, w in sorted(vectors.vector(doc_id).items())}
            for doc_id in vectors.doc_ids
        },
    }
    if similarity is not None:
        payload["similarity"] = similarity.values.tolist()
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)
