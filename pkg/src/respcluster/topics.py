"""One representative answer per main cluster via hub/authority scoring.

Each cluster of at least ``min_size`` answers induces a within-cluster
cosine similarity graph (raw-variant vectors, zero diagonal).  Power
iteration on that graph yields the authority vector, and the answer with
the top authority score is the cluster's representative.  Since the
graph is symmetric, the authority vector is the principal eigenvector of
the similarity matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cluster import Clustering
from .corpus import Classification, Corpus
from .vectorize import DocumentVectors


def main_clusters(clustering: Clustering, min_size: int = 4) -> list[tuple[int, list[str]]]:
    """Clusters with at least ``min_size`` members, in cluster-id order."""
    if min_size < 2:
        raise ValueError("min_size must be >= 2")
    return [
        (cid, members)
        for cid, members in enumerate(clustering.clusters())
        if len(members) >= min_size
    ]


def hits(a: np.ndarray, tol: float = 1e-8, max_iter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Hub and authority vectors of a non-negative adjacency matrix.

    Power iteration from a uniform start with L2 normalization each
    step; stops when both vectors move less than ``tol``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency matrix must be square")
    if (a < 0).any():
        raise ValueError("adjacency matrix must be non-negative")
    if np.diagonal(a).any():
        raise ValueError("adjacency matrix must have a zero diagonal")
    if not a.any():
        raise ValueError("no connectivity")
    n = a.shape[0]
    hub = np.full(n, 1.0 / np.sqrt(n))
    auth = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        auth_new = a.T @ hub
        auth_new /= np.linalg.norm(auth_new)
        hub_new = a @ auth_new
        hub_new /= np.linalg.norm(hub_new)
        done = (
            np.linalg.norm(auth_new - auth) < tol
            and np.linalg.norm(hub_new - hub) < tol
        )
        auth, hub = auth_new, hub_new
        if done:
            break
    return hub, auth


@dataclass(frozen=True)
class ClusterRepresentative:
    cluster_id: int
    doc_id: str
    size: int
    authority_scores: dict[str, float]
    major_class: str | None = None
    disconnected: bool = False


def _major_class(members: list[str], labels: Classification) -> str:
    weight_by_class: dict[str, float] = {}
    for doc_id in members:
        for cls, w in labels.weights_for(doc_id).items():
            weight_by_class[cls] = weight_by_class.get(cls, 0.0) + w
    top = max(weight_by_class.values())
    return min(cls for cls, w in weight_by_class.items() if w == top)


def representatives(
    clustering: Clustering,
    raw_vectors: DocumentVectors,
    min_size: int = 4,
    labels: Classification | None = None,
) -> list[ClusterRepresentative]:
    """Representative document of every main cluster.

    ``raw_vectors`` should be built from the raw data variant.  A cluster
    whose members share no terms at all has no connectivity; it falls
    back to the first member and is flagged disconnected.
    """
    if set(clustering.assignment) != set(raw_vectors.doc_ids):
        raise ValueError("clustering and vectors cover different documents")
    out: list[ClusterRepresentative] = []
    for cid, members in main_clusters(clustering, min_size):
        x = raw_vectors.dense(members)
        sim = np.clip(x @ x.T, 0.0, 1.0)
        np.fill_diagonal(sim, 0.0)
        if not sim.any():
            auth = np.full(len(members), 1.0 / np.sqrt(len(members)))
            rep_idx = 0
            disconnected = True
        else:
            _, auth = hits(sim)
            rep_idx = int(np.argmax(auth))
            disconnected = False
        out.append(
            ClusterRepresentative(
                cluster_id=cid,
                doc_id=members[rep_idx],
                size=len(members),
                authority_scores={d: float(s) for d, s in zip(members, auth)},
                major_class=_major_class(members, labels) if labels is not None else None,
                disconnected=disconnected,
            )
        )
    return out


def topics_tsv(reps: list[ClusterRepresentative], corpus: Corpus) -> str:
    """Report for manual inspection of whether representatives match topics."""
    lines = ["\t".join(
        ["cluster_id", "size", "representative_id", "representative_text",
         "major_class", "authority_score", "disconnected"]
    )]
    for rep in reps:
        text = corpus.text(rep.doc_id).replace("\t", " ").replace("\n", " ")
        lines.append(
            "\t".join(
                [
                    str(rep.cluster_id),
                    str(rep.size),
                    rep.doc_id,
                    text,
                    rep.major_class or "-",
                    f"{rep.authority_scores[rep.doc_id]:.6f}",
                    "yes" if rep.disconnected else "no",
                ]
            )
        )
    return "\n".join(lines) + "\n"
