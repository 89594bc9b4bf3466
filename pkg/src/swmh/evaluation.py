"""Topic scoring and document features."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .cluster import Topic
from .corpus import Corpus, InvertedFile


def _head(topic: Topic, M: int) -> tuple[int, ...]:
    return topic.terms[: min(M, len(topic.terms))]


def coherence(topic: Topic, inv: InvertedFile, M: int = 10) -> float:
    """Co-document coherence of the first ``M`` terms.

    Sum over ordered pairs l < m of log((D(v_m, v_l) + 1) / (D(v_l) + 1)).
    Smoothing both sides keeps every term finite and non-positive.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    head = _head(topic, M)
    for v in head:
        if inv.doc_freq(v) == 0:
            raise ValueError(f"term {v} occurs in no document")
    total = 0.0
    for m in range(1, len(head)):
        for l in range(m):
            total += math.log((inv.co_doc_freq(head[m], head[l]) + 1) / (inv.doc_freq(head[l]) + 1))
    return total


def rank_score(topic: Topic, inv: InvertedFile, M: int = 10) -> float:
    """Mean fraction of the first term's documents that also hold each of terms 2..M."""
    head = _head(topic, M)
    if len(head) < 2:
        return 0.0
    d1 = inv.doc_freq(head[0])
    if d1 == 0:
        return 0.0
    return sum(inv.co_doc_freq(head[0], v) for v in head[1:]) / (d1 * (len(head) - 1))


def rank_topics(topics: Sequence[Topic], inv: InvertedFile, M: int = 10) -> list[Topic]:
    """New list of scored topics, best first.

    Ties on score go to larger support, then larger topics, then the
    smaller first term id.
    """
    scored = [replace(t, score=rank_score(t, inv, M)) for t in topics]
    return sorted(scored, key=lambda t: (-t.score, -t.support, -len(t.terms), t.terms[0]))


@dataclass
class CoherenceReport:
    coherences: list[float]
    M: int
    flagged: list[int]

    @property
    def summary(self) -> dict[str, float]:
        if not self.coherences:
            return {}
        q = np.quantile(np.asarray(self.coherences), [0.0, 0.25, 0.5, 0.75, 1.0])
        return dict(zip(("min", "q1", "median", "q3", "max"), map(float, q)))


def coherence_report(topics: Sequence[Topic], inv: InvertedFile, M: int = 10) -> CoherenceReport:
    """Coherence of every topic; topics with fewer than two terms score 0 and are flagged."""
    values = [coherence(t, inv, M) for t in topics]
    flagged = [i for i, t in enumerate(topics) if len(t.terms) < 2]
    return CoherenceReport(values, M, flagged)


def doc_topic_features(corpus: Corpus, topics: Sequence[Topic]) -> sp.csr_matrix:
    """Fraction of each topic's terms present in each document.

    Returns a ``num_docs x len(topics)`` sparse matrix with zeros omitted.
    """
    if not topics:
        raise ValueError("no topics to build features from")
    V = corpus.vocab_size
    doc_rows = [sorted(d) for d in corpus.docs]
    indptr = np.zeros(corpus.num_docs + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r in doc_rows])
    idx = np.array([t for r in doc_rows for t in r], dtype=np.int64)
    X = sp.csr_matrix((np.ones(len(idx)), idx, indptr), shape=(corpus.num_docs, V))

    t_indptr = np.zeros(len(topics) + 1, dtype=np.int64)
    t_indptr[1:] = np.cumsum([len(t.terms) for t in topics])
    t_idx = np.array([v for t in topics for v in t.terms], dtype=np.int64)
    B = sp.csr_matrix((np.ones(len(t_idx)), t_idx, t_indptr), shape=(len(topics), V))

    sizes = np.diff(t_indptr).astype(np.float64)
    F = (X @ B.T).tocsr()
    F = F @ sp.diags(1.0 / sizes)
    F = sp.csr_matrix(F)
    F.eliminate_zeros()
    F.sort_indices()
    return F
