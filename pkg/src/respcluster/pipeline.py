"""Experiment orchestration behind the command line interface.

Runs the method x variant grid (clustering is done on the filtered and
stemmed variants by default; topic extraction always reads the raw
variant), evaluates against the human classification, and writes all
reports.  Outputs are deterministic for a fixed seed: files carry a
config hash instead of timestamps and are written atomically.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .cluster import (
    APParams,
    Clustering,
    ConvergenceError,
    KMeansParams,
    affinity_propagation,
    elbow_select_k,
    kmeans,
    spectral,
)
from .corpus import Classification, Corpus, corpus_stats, load_corpus, load_labels
from .evaluate import evaluate_grid
from .preprocess import VariantConfig, load_stoplist, preprocess_corpus
from .topics import representatives, topics_tsv
from .vectorize import DocumentVectors, SimilarityMatrix, build_vocabulary, similarity_matrix, tfidf_vectors

log = logging.getLogger("respcluster")

METHODS = ("kmeans", "ap", "spectral")
DEFAULT_GRID_VARIANTS = ("filtered", "stemmed")
AUTO_K_MAX = 12


@dataclass(frozen=True)
class RunConfig:
    corpus_path: str
    labels_path: str | None = None
    stoplist_path: str | None = None
    methods: tuple[str, ...] = METHODS
    variants: tuple[str, ...] = DEFAULT_GRID_VARIANTS
    k: int | None = None  # None = choose by the elbow rule
    seed: int = 0
    min_cluster_size: int = 4
    damping: float = 0.5
    preference: float | None = None
    stemmer: str = "en-suffix"
    min_df: int = 1
    out_dir: str = "out"
    jobs: int = 1
    emphasize_best: bool = False

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:12]


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


def _file_header(config: RunConfig) -> dict:
    return {"version": __version__, "config": config.config_hash(), "seed": config.seed}


def build_vectors(corpus: Corpus, variant: str, config: RunConfig) -> DocumentVectors:
    stoplist = load_stoplist(config.stoplist_path) if config.stoplist_path else None
    vc = VariantConfig(variant=variant, stoplist=stoplist, stemmer=config.stemmer)
    docs = preprocess_corpus(corpus, vc)
    vocab = build_vocabulary(docs, min_df=config.min_df)
    return tfidf_vectors(docs, vocab)


def choose_k(vectors: DocumentVectors, config: RunConfig) -> int:
    """Fixed k if configured, otherwise the elbow of the MSE curve."""
    if config.k is not None:
        return config.k
    n = len(vectors.nonempty_ids())
    k_min, k_max = 2, min(AUTO_K_MAX, n - 1)
    if k_max - k_min < 2:
        log.warning("too few documents for the elbow rule (%d non-empty); using k=2", n)
        return 2
    params = KMeansParams(k=2, seed=config.seed)
    return elbow_select_k(vectors, k_min, k_max, params)


def run_method(
    method: str,
    variant: str,
    vectors: DocumentVectors,
    sim: SimilarityMatrix,
    k: int,
    config: RunConfig,
) -> Clustering:
    if method == "kmeans":
        return kmeans(vectors, KMeansParams(k=k, seed=config.seed), variant=variant)
    if method == "ap":
        params = APParams(preference=config.preference, damping=config.damping)
        return affinity_propagation(sim, params, variant=variant)
    if method == "spectral":
        return spectral(sim, k, seed=config.seed, variant=variant)
    raise ValueError(f"unknown method: {method!r} (expected one of {METHODS})")


def save_clustering(
    clustering: Clustering, corpus: Corpus, path: Path, config: RunConfig, params: dict
) -> None:
    """Write a clustering as JSONL: one header line, then id/cluster records."""
    header = {
        "method": clustering.method,
        "variant": clustering.variant,
        "M": clustering.M,
        "params": params,
        **_file_header(config),
    }
    lines = [json.dumps(header, sort_keys=True)]
    for doc_id in corpus.ids:
        lines.append(json.dumps({"id": doc_id, "cluster": clustering.assignment[doc_id]}))
    _atomic_write(path, "\n".join(lines) + "\n")


def load_clustering(path: Path) -> Clustering:
    lines = path.read_text(encoding="utf-8-sig").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty clustering file")
    header = json.loads(lines[0])
    if "method" not in header:
        raise ValueError(f"{path}: first line must be the clustering header")
    assignment = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        rec = json.loads(line)
        assignment[rec["id"]] = int(rec["cluster"])
    return Clustering(
        assignment=assignment,
        M=int(header["M"]),
        method=header["method"],
        variant=header.get("variant"),
    )


def cmd_stats(config: RunConfig) -> str:
    """A Table-style summary row: raw and stemmed token statistics."""
    corpus = load_corpus(config.corpus_path)
    labels = load_labels(config.labels_path, corpus) if config.labels_path else None
    stoplist = load_stoplist(config.stoplist_path) if config.stoplist_path else None
    raw = corpus_stats(corpus, labels, VariantConfig(variant="raw"))
    stemmed = corpus_stats(
        corpus, labels, VariantConfig(variant="stemmed", stoplist=stoplist, stemmer=config.stemmer)
    )
    columns = ["n_A", "mu_A", "n_W", "mu_S", "n_SW"]
    values = [
        str(raw.n_answers),
        f"{raw.mean_tokens:.1f}",
        str(raw.vocab_size),
        f"{stemmed.mean_tokens:.1f}",
        str(stemmed.vocab_size),
    ]
    if labels is not None:
        columns += ["K", "n_ol", "n_mc"]
        values += [str(raw.n_proper_classes), str(raw.n_outliers), str(raw.n_multiclass)]
    return "\t".join(columns) + "\n" + "\t".join(values) + "\n"


def _cell_params(method: str, k: int, config: RunConfig) -> dict:
    if method == "ap":
        return {"preference": config.preference, "damping": config.damping}
    return {"k": k, "seed": config.seed}


def cmd_cluster(config: RunConfig, method: str, variant: str) -> Path:
    """Run one method on one variant and write the clustering file."""
    corpus = load_corpus(config.corpus_path)
    vectors = build_vectors(corpus, variant, config)
    sim = similarity_matrix(vectors)
    k = choose_k(vectors, config) if method in ("kmeans", "spectral") else 0
    clustering = run_method(method, variant, vectors, sim, k, config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"clustering_{method}_{variant}.jsonl"
    save_clustering(clustering, corpus, path, config, _cell_params(method, k, config))
    return path


def cmd_evaluate(config: RunConfig, clustering_paths: list[Path]) -> Path:
    """Score stored clusterings against the labels; write TSV and JSON."""
    if not config.labels_path:
        raise ValueError("evaluation requires a label file (--labels)")
    corpus = load_corpus(config.corpus_path)
    labels = load_labels(config.labels_path, corpus)
    clusterings = [load_clustering(p) for p in clustering_paths]
    for path, clustering in zip(clustering_paths, clusterings):
        if set(clustering.assignment) != set(corpus.ids):
            raise ValueError(f"{path}: clustering does not cover the corpus")
    report = evaluate_grid(clusterings, labels)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = _file_header(config)
    comment = f"# respcluster={header['version']} config={header['config']} seed={header['seed']}\n"
    tsv_path = out / "evaluation.tsv"
    _atomic_write(tsv_path, comment + report.to_tsv(emphasize_best=config.emphasize_best))
    payload = {"header": header, **report.to_json_dict()}
    _atomic_write(out / "evaluation.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return tsv_path


def cmd_topics(config: RunConfig, clustering_path: Path) -> Path:
    """Extract representatives for one stored clustering (raw variant)."""
    corpus = load_corpus(config.corpus_path)
    labels = load_labels(config.labels_path, corpus) if config.labels_path else None
    clustering = load_clustering(clustering_path)
    if set(clustering.assignment) != set(corpus.ids):
        raise ValueError(f"{clustering_path}: clustering does not cover the corpus")
    raw_vectors = build_vectors(corpus, "raw", config)
    reps = representatives(clustering, raw_vectors, config.min_cluster_size, labels)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = _file_header(config)
    comment = f"# respcluster={header['version']} config={header['config']} seed={header['seed']}\n"
    name = f"topics_{clustering.method}_{clustering.variant or 'unknown'}.tsv"
    path = out / name
    _atomic_write(path, comment + topics_tsv(reps, corpus))
    return path


def cmd_grid(config: RunConfig) -> int:
    """Full grid: cluster, evaluate and extract topics for every cell.

    Returns the process exit code: 0 on success, 1 if some cells failed
    (the rest are still written).
    """
    if not config.labels_path:
        raise ValueError("the grid requires a label file (--labels)")
    corpus = load_corpus(config.corpus_path)
    labels = load_labels(config.labels_path, corpus)
    for method in config.methods:
        if method not in METHODS:
            raise ValueError(f"unknown method: {method!r} (expected one of {METHODS})")

    variants_needed = sorted(set(config.variants) | {"raw"})
    vectors = {v: build_vectors(corpus, v, config) for v in variants_needed}
    sims = {v: similarity_matrix(vectors[v]) for v in config.variants}
    ks = {
        v: (choose_k(vectors[v], config) if {"kmeans", "spectral"} & set(config.methods) else 0)
        for v in config.variants
    }

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = [(m, v) for m in config.methods for v in config.variants]

    def run_cell(cell: tuple[str, str]):
        method, variant = cell
        clustering = run_method(method, variant, vectors[variant], sims[variant], ks[variant], config)
        path = out / f"clustering_{method}_{variant}.jsonl"
        save_clustering(clustering, corpus, path, config, _cell_params(method, ks[variant], config))
        reps = representatives(clustering, vectors["raw"], config.min_cluster_size, labels)
        header = _file_header(config)
        comment = f"# respcluster={header['version']} config={header['config']} seed={header['seed']}\n"
        _atomic_write(out / f"topics_{method}_{variant}.tsv", comment + topics_tsv(reps, corpus))
        return clustering

    results: dict[tuple[str, str], Clustering] = {}
    failures: dict[tuple[str, str], str] = {}
    with ThreadPoolExecutor(max_workers=max(1, config.jobs)) as pool:
        futures = {cell: pool.submit(run_cell, cell) for cell in cells}
        for cell, future in futures.items():
            try:
                results[cell] = future.result()
            except ConvergenceError as exc:
                failures[cell] = str(exc)
                log.warning("cell %s/%s failed: %s", cell[0], cell[1], exc)

    ordered = [results[cell] for cell in cells if cell in results]
    if ordered:
        report = evaluate_grid(ordered, labels)
        header = _file_header(config)
        comment = f"# respcluster={header['version']} config={header['config']} seed={header['seed']}\n"
        _atomic_write(out / "evaluation.tsv", comment + report.to_tsv(config.emphasize_best))
        payload = {
            "header": header,
            "failures": {f"{m}/{v}": msg for (m, v), msg in sorted(failures.items())},
            **report.to_json_dict(),
        }
        _atomic_write(out / "evaluation.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 1 if failures else 0
