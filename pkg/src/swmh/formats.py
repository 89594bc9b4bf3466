"""Readers and writers for the text files the CLI produces."""

from __future__ import annotations

import csv
from typing import Mapping, Sequence, TextIO

import scipy.sparse as sp

from .cluster import Topic
from .evaluation import CoherenceReport

STATS_COLUMNS = (
    "documents",
    "vocab_size",
    "tables",
    "coterm_sets",
    "topics",
    "seconds_load",
    "seconds_partition",
    "seconds_cluster",
    "seconds_rank",
    "seconds_total",
    "peak_rss_mb",
)
# columns that measure the machine rather than the result
MEASURED_COLUMNS = frozenset(c for c in STATS_COLUMNS if c.startswith("seconds_")) | {"peak_rss_mb"}

COHERENCE_COLUMNS = ("topic_index", "coherence", "score", "support", "size")


class TopicsFileError(ValueError):
    pass


def write_topics(topics: Sequence[Topic], vocab: Sequence[str], out: TextIO) -> None:
    for t in topics:
        words = " ".join(vocab[v] for v in t.terms)
        out.write(f"{t.score:.6f}\t{t.support}\t{words}\n")


def read_topics(stream: TextIO, term_index: Mapping[str, int]) -> list[Topic]:
    topics = []
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise TopicsFileError(f"line {lineno}: expected score<TAB>support<TAB>terms")
        try:
            score, support = float(fields[0]), int(fields[1])
        except ValueError:
            raise TopicsFileError(f"line {lineno}: malformed score or support") from None
        terms = []
        for word in fields[2].split():
            if word not in term_index:
                raise TopicsFileError(f"line {lineno}: unknown term {word!r}")
            terms.append(term_index[word])
        try:
            topics.append(Topic(tuple(terms), support, score))
        except ValueError as exc:
            raise TopicsFileError(f"line {lineno}: {exc}") from None
    return topics


def write_coherence_csv(
    report: CoherenceReport, topics: Sequence[Topic], scores: Sequence[float], out: TextIO
) -> None:
    """Per-topic rows, then ``summary:*`` rows carrying values in the coherence column."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COHERENCE_COLUMNS)
    for i, (t, c, s) in enumerate(zip(topics, report.coherences, scores)):
        w.writerow([i, f"{c:.12g}", f"{s:.12g}", t.support, len(t.terms)])
    for name, value in report.summary.items():
        w.writerow([f"summary:{name}", f"{value:.12g}", "", "", ""])
    w.writerow(["summary:flagged", len(report.flagged), "", "", ""])


def write_svmlight(features: sp.csr_matrix, labels: Sequence[int], out: TextIO) -> None:
    """One line per row: ``label idx:val ...`` with 1-based feature indices."""
    features = sp.csr_matrix(features)
    features.sort_indices()
    for d in range(features.shape[0]):
        lo, hi = features.indptr[d], features.indptr[d + 1]
        items = " ".join(
            f"{j + 1}:{v:.6g}" for j, v in zip(features.indices[lo:hi].tolist(), features.data[lo:hi].tolist())
        )
        out.write(f"{labels[d]} {items}\n" if items else f"{labels[d]}\n")


def write_stats(rows: Sequence[Mapping[str, object]], out: TextIO) -> None:
    w = csv.DictWriter(out, fieldnames=STATS_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: row[k] for k in STATS_COLUMNS})
