"""Clustering and evaluation of short free-form questionnaire answers."""

__version__ = "0.1.0"

from .cluster import (
    APParams,
    Clustering,
    ConvergenceError,
    KMeansParams,
    affinity_propagation,
    elbow_select_k,
    kmeans,
    kmeans_detailed,
    mse,
    spectral,
)
from .corpus import (
    Classification,
    Corpus,
    CorpusStats,
    Document,
    corpus_stats,
    load_corpus,
    load_labels,
    save_corpus,
)
from .evaluate import evaluate_grid, exclude_singletons, nmi, purity
from .preprocess import VariantConfig, filter_stopwords, preprocess_corpus, stem, tokenize
from .topics import hits, main_clusters, representatives
from .vectorize import (
    DocumentVectors,
    SimilarityMatrix,
    Vocabulary,
    build_vocabulary,
    cosine_similarity,
    similarity_matrix,
    tfidf_vectors,
)

__all__ = [
    "APParams",
    "Classification",
    "Clustering",
    "ConvergenceError",
    "Corpus",
    "CorpusStats",
    "Document",
    "DocumentVectors",
    "KMeansParams",
    "SimilarityMatrix",
    "VariantConfig",
    "Vocabulary",
    "affinity_propagation",
    "build_vocabulary",
    "corpus_stats",
    "cosine_similarity",
    "elbow_select_k",
    "evaluate_grid",
    "exclude_singletons",
    "filter_stopwords",
    "hits",
    "kmeans",
    "kmeans_detailed",
    "load_corpus",
    "load_labels",
    "main_clusters",
    "mse",
    "nmi",
    "preprocess_corpus",
    "purity",
    "representatives",
    "save_corpus",
    "similarity_matrix",
    "spectral",
    "stem",
    "tfidf_vectors",
    "tokenize",
]
