"""Clustering engines and model selection.

Three methods over tf-idf document vectors: spherical k-means (Lloyd
iterations on unit vectors with k-means++ seeding), affinity propagation
(responsibility/availability message passing, no RNG), and spectral
clustering on the symmetric normalized Laplacian.  The cluster count for
k-means and spectral clustering can be chosen by the elbow rule on the
MSE curve.

Documents with no in-vocabulary tokens carry no similarity signal; every
engine excludes them up front and appends them afterwards as singleton
clusters.  All tie-breaks (nearest centroid, exemplar argmax) resolve to
the lowest index so results are bit-stable across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .vectorize import DocumentVectors, SimilarityMatrix


class ConvergenceError(RuntimeError):
    """A clustering run terminated without a usable solution."""


@dataclass(frozen=True)
class Clustering:
    """Hard partition of document ids into clusters 0..M-1."""

    assignment: Mapping[str, int]
    M: int
    method: str
    variant: str | None = None

    def __post_init__(self):
        if not self.assignment:
            raise ValueError("clustering must cover at least one document")
        if set(self.assignment.values()) != set(range(self.M)):
            raise ValueError("cluster ids must be exactly 0..M-1 with no empty clusters")

    def clusters(self) -> list[list[str]]:
        groups: list[list[str]] = [[] for _ in range(self.M)]
        for doc_id, cid in self.assignment.items():
            groups[cid].append(doc_id)
        return groups

    def sizes(self) -> list[int]:
        return [len(g) for g in self.clusters()]


@dataclass(frozen=True)
class KMeansParams:
    k: int
    seed: int = 0
    n_restarts: int = 10
    max_iter: int = 100
    tol: float = 1e-9

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.n_restarts < 1 or self.max_iter < 1 or self.tol < 0:
            raise ValueError("invalid k-means parameters")


@dataclass(frozen=True)
class APParams:
    preference: float | None = None
    damping: float = 0.5
    max_iter: int = 200
    convergence_iter: int = 15

    def __post_init__(self):
        if not (0.5 <= self.damping < 1.0):
            raise ValueError("damping must be in [0.5, 1)")
        if self.max_iter < 1 or self.convergence_iter < 1:
            raise ValueError("invalid affinity propagation parameters")


@dataclass(frozen=True)
class KMeansResult:
    clustering: Clustering
    mse: float
    objective_history: tuple[float, ...]
    restart: int


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    xx = np.einsum("ij,ij->i", x, x)[:, None]
    cc = np.einsum("ij,ij->i", centers, centers)[None, :]
    d2 = xx + cc - 2.0 * (x @ centers.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def _kmeanspp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    chosen: set[int] = set()
    idx = int(rng.integers(n))
    centers[0] = x[idx]
    chosen.add(idx)
    d2 = _sq_dists(x, centers[:1])[:, 0]
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # all points coincide with a chosen center
            idx = min(i for i in range(n) if i not in chosen)
        centers[j] = x[idx]
        chosen.add(idx)
        d2 = np.minimum(d2, _sq_dists(x, centers[j : j + 1])[:, 0])
    return centers


def _lloyd(
    x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int, tol: float
) -> tuple[np.ndarray, list[float]]:
    """Lloyd iterations with unit-renormalized centroids.

    Returns the final labels and the objective after each assignment
    step; that sequence is non-increasing.
    """
    n = x.shape[0]
    centers = _kmeanspp(x, k, rng)
    history: list[float] = []
    labels = np.zeros(n, dtype=int)
    prev = math.inf
    for _ in range(max_iter):
        d2 = _sq_dists(x, centers)
        labels = d2.argmin(axis=1)
        own = d2[np.arange(n), labels]
        obj = float(own.mean())
        assert obj <= prev + 1e-12, "objective increased across Lloyd iterations"
        history.append(obj)
        if prev - obj < tol:
            break
        prev = obj
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, x)
        counts = np.bincount(labels, minlength=k)
        empties = []
        for j in range(k):
            if counts[j] == 0:
                empties.append(j)
                continue
            mean = sums[j] / counts[j]
            norm = np.linalg.norm(mean)
            centers[j] = mean / norm if norm > 0 else mean
        if empties:
            # revive each empty cluster at the point farthest from its centroid
            order = np.argsort(-own, kind="stable")
            for rank, j in enumerate(empties):
                centers[j] = x[order[rank]]
    return labels, history


def _canonical_assignment(doc_ids: Sequence[str], labels: Sequence[int]) -> tuple[dict[str, int], int]:
    """Renumber cluster labels by first appearance in document order."""
    remap: dict[int, int] = {}
    assignment: dict[str, int] = {}
    for doc_id, lab in zip(doc_ids, labels):
        lab = int(lab)
        if lab not in remap:
            remap[lab] = len(remap)
        assignment[doc_id] = remap[lab]
    return assignment, len(remap)


def _with_singleton_appendix(
    assignment: dict[str, int], m: int, singleton_ids: Sequence[str]
) -> tuple[dict[str, int], int]:
    out = dict(assignment)
    for doc_id in singleton_ids:
        out[doc_id] = m
        m += 1
    return out, m


def kmeans_detailed(
    vectors: DocumentVectors, params: KMeansParams, variant: str | None = None
) -> KMeansResult:
    """Best-of-restarts spherical k-means with its objective trace."""
    ids = vectors.nonempty_ids()
    if params.k > len(ids):
        raise ValueError(f"k={params.k} exceeds the {len(ids)} non-empty documents")
    x = vectors.dense(ids)
    best: tuple[float, int, np.ndarray, list[float]] | None = None
    for r in range(params.n_restarts):
        rng = np.random.default_rng([params.seed, r])
        labels, history = _lloyd(x, params.k, rng, params.max_iter, params.tol)
        if best is None or history[-1] < best[0]:
            best = (history[-1], r, labels, history)
    obj, restart, labels, history = best
    assignment, m = _canonical_assignment(ids, labels)
    empty_in_order = [d for d in vectors.doc_ids if d in vectors.empty_docs]
    assignment, m = _with_singleton_appendix(assignment, m, empty_in_order)
    clustering = Clustering(assignment, m, "kmeans", variant)
    return KMeansResult(clustering, obj, tuple(history), restart)


def kmeans(
    vectors: DocumentVectors, params: KMeansParams, variant: str | None = None
) -> Clustering:
    return kmeans_detailed(vectors, params, variant).clustering


def mse(vectors: DocumentVectors, clustering: Clustering) -> float:
    """Mean squared distance of documents to their cluster's unit centroid."""
    if set(clustering.assignment) != set(vectors.doc_ids):
        raise ValueError("clustering and vectors cover different documents")
    x = vectors.dense()
    row = {d: i for i, d in enumerate(vectors.doc_ids)}
    total = 0.0
    for members in clustering.clusters():
        rows = x[[row[d] for d in members]]
        mean = rows.mean(axis=0)
        norm = np.linalg.norm(mean)
        center = mean / norm if norm > 0 else mean
        total += float(((rows - center) ** 2).sum())
    return total / len(vectors.doc_ids)


def elbow_point(ks: Sequence[int], mses: Sequence[float]) -> int:
    """Interior k maximizing the discrete second difference of the MSE curve."""
    if len(ks) != len(mses) or len(ks) < 3:
        raise ValueError("need at least three consecutive k values")
    best_k = None
    best_curv = -math.inf
    for i in range(1, len(ks) - 1):
        curvature = mses[i - 1] - 2.0 * mses[i] + mses[i + 1]
        if curvature > best_curv:
            best_curv = curvature
            best_k = ks[i]
    return best_k


def elbow_select_k(
    vectors: DocumentVectors, k_min: int, k_max: int, params: KMeansParams
) -> int:
    """Run k-means over [k_min, k_max] and pick the elbow of the MSE curve."""
    n = len(vectors.nonempty_ids())
    if not (2 <= k_min < k_max <= n - 1):
        raise ValueError(f"k range [{k_min}, {k_max}] invalid for {n} non-empty documents")
    if k_max - k_min < 2:
        raise ValueError("k range has no interior point")
    ks = list(range(k_min, k_max + 1))
    mses = [kmeans_detailed(vectors, replace(params, k=k)).mse for k in ks]
    return elbow_point(ks, mses)


def affinity_propagation(
    S: SimilarityMatrix, params: APParams = APParams(), variant: str | None = None
) -> Clustering:
    """Exemplar clustering by responsibility/availability message passing.

    Deterministic: instead of random noise, exemplar ties are broken by a
    vanishing preference bonus for lower document indices.
    """
    vals = S.values
    nonempty = [i for i in range(S.n) if vals[i, i] > 0]
    ids = [S.doc_ids[i] for i in nonempty]
    n = len(ids)
    if n < 2:
        raise ValueError("affinity propagation needs at least 2 non-empty documents")
    sim = vals[np.ix_(nonempty, nonempty)].astype(float)
    if not np.allclose(sim, sim.T, atol=1e-12):
        raise ValueError("similarity matrix is not symmetric")

    off = sim[~np.eye(n, dtype=bool)]
    preference = float(np.median(off)) if params.preference is None else params.preference
    scale = max(1.0, float(np.abs(off).max()), abs(preference))
    s = sim.copy()
    np.fill_diagonal(s, preference - 1e-10 * scale * np.arange(n))

    lam = params.damping
    r_msg = np.zeros((n, n))
    a_msg = np.zeros((n, n))
    rows = np.arange(n)
    exemplars = np.empty(0, dtype=int)
    stable = 0
    for _ in range(params.max_iter):
        # responsibilities: r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k'))
        as_sum = a_msg + s
        top = as_sum.argmax(axis=1)
        first = as_sum[rows, top].copy()
        as_sum[rows, top] = -np.inf
        second = as_sum.max(axis=1)
        r_new = s - first[:, None]
        r_new[rows, top] = s[rows, top] - second
        r_msg = lam * r_msg + (1.0 - lam) * r_new
        # availabilities from positive responsibilities
        r_pos = np.maximum(r_msg, 0.0)
        r_pos[rows, rows] = r_msg[rows, rows]
        colsum = r_pos.sum(axis=0)
        a_new = colsum[None, :] - r_pos
        diag = a_new[rows, rows].copy()
        a_new = np.minimum(a_new, 0.0)
        a_new[rows, rows] = diag
        a_msg = lam * a_msg + (1.0 - lam) * a_new

        current = np.flatnonzero(r_msg.diagonal() + a_msg.diagonal() > 0)
        if current.size and np.array_equal(current, exemplars):
            stable += 1
            if stable >= params.convergence_iter:
                exemplars = current
                break
        else:
            stable = 0
        exemplars = current

    if exemplars.size == 0:
        raise ConvergenceError("affinity propagation did not converge to any exemplar")

    choice = sim[:, exemplars].argmax(axis=1)
    labels = exemplars[choice]
    labels[exemplars] = exemplars
    assignment, m = _canonical_assignment(ids, labels)
    empty_ids = [S.doc_ids[i] for i in range(S.n) if i not in set(nonempty)]
    assignment, m = _with_singleton_appendix(assignment, m, empty_ids)
    return Clustering(assignment, m, "ap", variant)


def spectral(
    S: SimilarityMatrix,
    k: int,
    seed: int = 0,
    variant: str | None = None,
    n_restarts: int = 10,
) -> Clustering:
    """Normalized-Laplacian spectral clustering.

    Documents with zero total similarity (including empty documents) are
    split off as singleton clusters before the eigendecomposition.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    a = S.values.astype(float).copy()
    np.fill_diagonal(a, 0.0)
    if (a < 0).any():
        raise ValueError("similarity matrix must be non-negative")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ValueError("similarity matrix is not symmetric")
    degree = a.sum(axis=1)
    connected = [i for i in range(S.n) if degree[i] > 0]
    isolated = [i for i in range(S.n) if degree[i] == 0]
    if k > len(connected):
        raise ValueError(f"k={k} exceeds the {len(connected)} connected documents")

    ac = a[np.ix_(connected, connected)]
    dinv = 1.0 / np.sqrt(ac.sum(axis=1))
    lap = np.eye(len(connected)) - (dinv[:, None] * ac) * dinv[None, :]
    lap = (lap + lap.T) / 2.0
    _, eigvecs = np.linalg.eigh(lap)
    embedding = eigvecs[:, :k].copy()
    norms = np.linalg.norm(embedding, axis=1)
    nonzero = norms > 0
    embedding[nonzero] /= norms[nonzero, None]

    best: tuple[float, int, np.ndarray] | None = None
    for r in range(n_restarts):
        rng = np.random.default_rng([seed, r])
        labels, history = _lloyd(embedding, k, rng, max_iter=100, tol=1e-9)
        if best is None or history[-1] < best[0]:
            best = (history[-1], r, labels)
    labels = best[2]
    ids_connected = [S.doc_ids[i] for i in connected]
    assignment, m = _canonical_assignment(ids_connected, labels)
    assignment, m = _with_singleton_appendix(assignment, m, [S.doc_ids[i] for i in isolated])
    return Clustering(assignment, m, "spectral", variant)
