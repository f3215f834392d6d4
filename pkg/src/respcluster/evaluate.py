"""Clustering quality against probabilistic human classifications.

Purity generalizes to weighted membership: a document in m classes
contributes weight 1/m to each of them, so purity stays below 1 as soon
as any document is multi-class.  NMI uses the weighted joint estimate
P(cluster, class) = (1/N) sum of w(class|d) over the cluster, hard
cluster marginals, and weighted class marginals.  Entropies are the
standard -sum p ln p in nats; degenerate entropies give NMI = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cluster import Clustering
from .corpus import Classification


def _check_same_docs(clustering: Clustering, labels: Classification) -> None:
    if set(clustering.assignment) != set(labels.membership):
        raise ValueError("clustering and classification cover different documents")


def purity(clustering: Clustering, labels: Classification) -> float:
    """Weighted purity: mean over clusters of the best summed class weight."""
    _check_same_docs(clustering, labels)
    n = len(clustering.assignment)
    total = 0.0
    for members in clustering.clusters():
        by_class: dict[str, float] = {}
        for doc_id in members:
            for cls, w in labels.weights_for(doc_id).items():
                by_class[cls] = by_class.get(cls, 0.0) + w
        total += max(by_class.values())
    return total / n


@dataclass(frozen=True)
class NmiDiagnostics:
    """Intermediate quantities behind one NMI value (logs in nats)."""

    mutual_information: float
    h_clustering: float
    h_classes: float
    joint: dict[tuple[int, str], float]


def _nmi_parts(clustering: Clustering, labels: Classification) -> NmiDiagnostics:
    n = len(clustering.assignment)
    joint: dict[tuple[int, str], float] = {}
    p_cluster: dict[int, float] = {}
    p_class: dict[str, float] = {}
    for doc_id, cid in clustering.assignment.items():
        p_cluster[cid] = p_cluster.get(cid, 0.0) + 1.0 / n
        for cls, w in labels.weights_for(doc_id).items():
            joint[(cid, cls)] = joint.get((cid, cls), 0.0) + w / n
            p_class[cls] = p_class.get(cls, 0.0) + w / n
    info = 0.0
    for (cid, cls), p in joint.items():
        if p > 0.0:
            info += p * math.log(p / (p_cluster[cid] * p_class[cls]))
    h_omega = -sum(p * math.log(p) for p in p_cluster.values() if p > 0.0)
    h_c = -sum(p * math.log(p) for p in p_class.values() if p > 0.0)
    return NmiDiagnostics(info, h_omega, h_c, joint)


def nmi(clustering: Clustering, labels: Classification) -> float:
    """Normalized mutual information in [0, 1]; 0 when either side is degenerate."""
    _check_same_docs(clustering, labels)
    parts = _nmi_parts(clustering, labels)
    if parts.h_clustering <= 0.0 or parts.h_classes <= 0.0:
        return 0.0
    value = parts.mutual_information / math.sqrt(parts.h_clustering * parts.h_classes)
    if -1e-12 < value < 0.0:
        value = 0.0
    return min(value, 1.0)


def nmi_diagnostics(clustering: Clustering, labels: Classification) -> NmiDiagnostics:
    _check_same_docs(clustering, labels)
    return _nmi_parts(clustering, labels)


def exclude_singletons(clustering: Clustering) -> Clustering:
    """Drop singleton clusters (and their documents); renumber the rest."""
    keep = [cid for cid, size in enumerate(clustering.sizes()) if size >= 2]
    if not keep:
        raise ValueError("no non-singleton clusters")
    remap = {cid: i for i, cid in enumerate(keep)}
    assignment = {
        doc_id: remap[cid]
        for doc_id, cid in clustering.assignment.items()
        if cid in remap
    }
    return Clustering(assignment, len(keep), clustering.method, clustering.variant)


@dataclass(frozen=True)
class EvaluationRow:
    method: str
    variant: str | None
    M: int
    purity: float
    nmi: float
    singleton_count: int
    purity_excl_singletons: float | None
    diagnostics: NmiDiagnostics | None = None


@dataclass(frozen=True)
class EvaluationReport:
    rows: tuple[EvaluationRow, ...]
    n_docs: int

    _COLUMNS = ("method", "variant", "M", "purity", "nmi", "singletons", "purity_excl_singletons")

    def best_flags(self) -> dict[str, set[int]]:
        """Row indices holding the per-column maximum of purity and nmi."""
        flags: dict[str, set[int]] = {}
        for col in ("purity", "nmi"):
            values = [getattr(row, col) for row in self.rows]
            top = max(values)
            flags[col] = {i for i, v in enumerate(values) if v == top}
        return flags

    def to_tsv(self, emphasize_best: bool = False) -> str:
        flags = self.best_flags() if emphasize_best else {"purity": set(), "nmi": set()}
        lines = ["\t".join(self._COLUMNS)]
        for i, row in enumerate(self.rows):
            mark_p = "*" if i in flags["purity"] else ""
            mark_n = "*" if i in flags["nmi"] else ""
            excl = "" if row.purity_excl_singletons is None else f"{row.purity_excl_singletons:.6f}"
            lines.append(
                "\t".join(
                    [
                        row.method,
                        row.variant or "-",
                        str(row.M),
                        f"{row.purity:.6f}{mark_p}",
                        f"{row.nmi:.6f}{mark_n}",
                        str(row.singleton_count),
                        excl,
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        flags = self.best_flags()
        rows = []
        for i, row in enumerate(self.rows):
            entry = {
                "method": row.method,
                "variant": row.variant,
                "M": row.M,
                "purity": row.purity,
                "nmi": row.nmi,
                "singletons": row.singleton_count,
                "purity_excl_singletons": row.purity_excl_singletons,
                "best_purity": i in flags["purity"],
                "best_nmi": i in flags["nmi"],
            }
            if row.diagnostics is not None:
                entry["diagnostics"] = {
                    "mutual_information_nats": row.diagnostics.mutual_information,
                    "h_clustering_nats": row.diagnostics.h_clustering,
                    "h_classes_nats": row.diagnostics.h_classes,
                }
            rows.append(entry)
        return {"n_docs": self.n_docs, "rows": rows}


def evaluate_one(
    clustering: Clustering, labels: Classification, diagnostics: bool = False
) -> EvaluationRow:
    _check_same_docs(clustering, labels)
    singleton_count = sum(1 for size in clustering.sizes() if size == 1)
    if singleton_count == 0:
        excl = purity(clustering, labels)
    elif singleton_count == clustering.M:
        excl = None
    else:
        restricted = exclude_singletons(clustering)
        excl = purity(restricted, labels.restrict(restricted.assignment))
    return EvaluationRow(
        method=clustering.method,
        variant=clustering.variant,
        M=clustering.M,
        purity=purity(clustering, labels),
        nmi=nmi(clustering, labels),
        singleton_count=singleton_count,
        purity_excl_singletons=excl,
        diagnostics=nmi_diagnostics(clustering, labels) if diagnostics else None,
    )


def evaluate_grid(
    clusterings: list[Clustering], labels: Classification, diagnostics: bool = False
) -> EvaluationReport:
    """One evaluation row per clustering, all over the same corpus."""
    if not clusterings:
        raise ValueError("no clusterings to evaluate")
    doc_sets = {frozenset(c.assignment) for c in clusterings}
    if len(doc_sets) != 1:
        raise ValueError("clusterings cover different corpora")
    rows = tuple(evaluate_one(c, labels, diagnostics) for c in clusterings)
    return EvaluationReport(rows=rows, n_docs=len(clusterings[0].assignment))
