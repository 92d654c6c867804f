"""Feature matrices over representatives, TF-IDF weighting, and the
hard-to-soft sense clustering of one target's representatives."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from . import kernels
from .representatives import Representative

RowMeta = Tuple[str, int]  # (instance_id, rep_index)


@dataclass
class FeatureMatrix:
    matrix: sp.csr_matrix  # nk x |V| nonnegative counts or TF-IDF weights
    vocab: List[str]
    row_meta: List[RowMeta]

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]


def build_matrix(reps: Sequence[Representative]) -> FeatureMatrix:
    """Bag-of-lemmas count matrix, one row per representative.

    Vocabulary is the sorted set of lemmas over all representatives; entry
    (r, w) is the multiplicity of w in representative r.
    """
    if not reps:
        raise ValueError("no representatives to build a matrix from")
    vocab = sorted({w for rep in reps for w in rep.words})
    index = {w: i for i, w in enumerate(vocab)}

    indptr = [0]
    indices: List[int] = []
    data: List[int] = []
    row_meta: List[RowMeta] = []
    rep_counter: Counter = Counter()
    for rep in reps:
        counts = sorted((index[w], c) for w, c in Counter(rep.words).items())
        indices.extend(i for i, _ in counts)
        data.extend(c for _, c in counts)
        indptr.append(len(indices))
        row_meta.append((rep.instance_id, rep_counter[rep.instance_id]))
        rep_counter[rep.instance_id] += 1

    matrix = sp.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices), np.array(indptr)),
        shape=(len(reps), len(vocab)),
    )
    return FeatureMatrix(matrix, vocab, row_meta)


def tfidf(fm: FeatureMatrix, enabled: bool = True) -> FeatureMatrix:
    """Smoothed-idf TF-IDF with L2 row normalization:
    weight(t, d) = count(t, d) * (ln((1 + N) / (1 + df(t))) + 1).

    With enabled=False this is a passthrough, the ablation mode.
    """
    if not enabled:
        return fm
    counts = fm.matrix
    n_rows = counts.shape[0]
    df = np.asarray((counts > 0).sum(axis=0)).ravel()
    idf = np.log((1.0 + n_rows) / (1.0 + df)) + 1.0
    weighted = counts.multiply(idf[np.newaxis, :]).tocsr()
    norms = np.sqrt(np.asarray(weighted.multiply(weighted).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    normalized = sp.diags(inv) @ weighted
    return FeatureMatrix(normalized.tocsr(), fm.vocab, fm.row_meta)


def cosine_distances(matrix: sp.csr_matrix) -> np.ndarray:
    """Dense symmetric matrix of 1 - cosine similarity between rows."""
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    unit = sp.diags(inv) @ matrix
    sims = (unit @ unit.T).toarray()
    dist = 1.0 - sims
    np.clip(dist, 0.0, 2.0, out=dist)
    # canonical upper-triangle values so ties are bitwise symmetric
    upper = np.triu(dist, 1)
    return upper + upper.T


def agglomerative_cluster(fm: FeatureMatrix, n_clusters: int = 7) -> np.ndarray:
    """Average-linkage agglomeration under cosine distance down to
    max(n_clusters, 1) clusters (or singletons when there are fewer rows).

    Returns one label per row, renumbered by first-row occurrence.
    """
    if n_clusters < 1:
        raise ValueError("n_clusters must be >= 1")
    n = fm.n_rows
    target = max(1, min(n_clusters, n))
    slots = kernels.merge_to_slots(cosine_distances(fm.matrix), target)
    return relabel_by_first_occurrence(slots)


def relabel_by_first_occurrence(slots: np.ndarray) -> np.ndarray:
    labels = np.empty(len(slots), dtype=np.int64)
    seen: Dict[int, int] = {}
    for r, slot in enumerate(slots):
        labels[r] = seen.setdefault(int(slot), len(seen))
    return labels


def induce_soft(labels: np.ndarray, row_meta: Sequence[RowMeta], k: int) -> Dict[str, Dict[str, float]]:
    """Per-instance soft assignment: probability of cluster i is the fraction
    of the instance's k representatives labeled i. Zero entries are omitted."""
    per_instance: Dict[str, Counter] = {}
    for (instance_id, _), label in zip(row_meta, labels):
        per_instance.setdefault(instance_id, Counter())[int(label)] += 1
    assignment: Dict[str, Dict[str, float]] = {}
    for instance_id, counts in per_instance.items():
        total = sum(counts.values())
        if total != k:
            raise ValueError(f"instance {instance_id!r} has {total} rows, expected {k}")
        assignment[instance_id] = {f"c{label}": count / k for label, count in sorted(counts.items())}
    return assignment
