"""Bag-of-words corpora in UCI format and their inverted files.

The docword format is three header lines (D, W, NNZ) followed by NNZ lines of
``docID wordID count`` with 1-based ids.  The vocab file holds one term per
line, line n being wordID n.
"""

from __future__ import annotations

import gzip
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

import numpy as np


class CorpusError(ValueError):
    """Invalid corpus content (bad counts, inconsistent files)."""


class ParseError(CorpusError):
    pass


class RangeError(CorpusError):
    pass


@dataclass
class Corpus:
    num_docs: int
    vocab: list[str]
    docs: list[dict[int, int]]
    labels: list[int] | None = None

    def __post_init__(self) -> None:
        if len(self.docs) != self.num_docs:
            raise CorpusError(f"expected {self.num_docs} documents, got {len(self.docs)}")
        V = len(self.vocab)
        for d, doc in enumerate(self.docs):
            for t, f in doc.items():
                if not 0 <= t < V:
                    raise RangeError(f"document {d}: term id {t} outside vocabulary of {V}")
                if f < 1:
                    raise CorpusError(f"document {d}: non-positive frequency {f} for term {t}")
        if self.labels is not None and len(self.labels) != self.num_docs:
            raise CorpusError(f"{len(self.labels)} labels for {self.num_docs} documents")

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def term_index(self) -> dict[str, int]:
        return {term: i for i, term in enumerate(self.vocab)}


@dataclass(frozen=True)
class InvertedFile:
    """Per-term posting lists stored in CSR layout.

    ``doc_ids[indptr[t]:indptr[t + 1]]`` are the documents containing term
    ``t`` in ascending order, with matching ``freqs``.
    """

    indptr: np.ndarray
    doc_ids: np.ndarray
    freqs: np.ndarray
    doc_sizes: np.ndarray
    doc_weights: np.ndarray
    _doc_sets: list = field(default_factory=list, repr=False, compare=False)

    @property
    def num_terms(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_docs(self) -> int:
        return len(self.doc_sizes)

    def posting(self, term: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[term], self.indptr[term + 1]
        return self.doc_ids[lo:hi], self.freqs[lo:hi]

    def postings(self, term: int) -> list[tuple[int, int]]:
        docs, freqs = self.posting(term)
        return list(zip(docs.tolist(), freqs.tolist()))

    def doc_freq(self, term: int) -> int:
        return int(self.indptr[term + 1] - self.indptr[term])

    def doc_set(self, term: int) -> frozenset[int]:
        # lazily cached; the inverted file is read-only after construction
        if not self._doc_sets:
            self._doc_sets.extend([None] * self.num_terms)
        s = self._doc_sets[term]
        if s is None:
            s = frozenset(self.posting(term)[0].tolist())
            self._doc_sets[term] = s
        return s

    def co_doc_freq(self, a: int, b: int) -> int:
        return len(self.doc_set(a) & self.doc_set(b))


def _open_binary(source) -> BinaryIO:
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.suffix == ".gz":
            return gzip.open(path, "rb")
        return open(path, "rb")
    return source


def _lines(stream: BinaryIO) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(stream, start=1):
        yield lineno, raw.decode("utf-8").rstrip("\r\n")


def _header_value(lines: Iterator[tuple[int, str]], name: str) -> int:
    try:
        lineno, text = next(lines)
    except StopIteration:
        raise ParseError(f"missing header line {name}") from None
    try:
        value = int(text.strip())
    except ValueError:
        raise ParseError(f"line {lineno}: malformed header {name}: {text!r}") from None
    if value < 0:
        raise ParseError(f"line {lineno}: negative header {name}")
    return value


def read_vocab(stream: BinaryIO) -> list[str]:
    vocab = [text.strip() for _, text in _lines(stream)]
    while vocab and vocab[-1] == "":
        vocab.pop()
    return vocab


def load_corpus(
    docword,
    vocab,
    min_term_freq: int = 6,
    max_docs: int | None = None,
    fraction: float = 1.0,
) -> Corpus:
    """Parse a UCI docword/vocab pair and apply the term frequency cutoff.

    ``docword`` and ``vocab`` are binary streams or paths (``.gz`` accepted).
    Terms whose total count over the kept documents is below
    ``min_term_freq`` are dropped and the surviving term ids re-densified in
    their original order.  Documents emptied by the cutoff are kept so that
    document ids stay aligned with external label files.  ``max_docs`` keeps
    only the first documents (ids above it are still range-checked);
    ``fraction`` keeps the first ceil(fraction * D) documents.
    """
    if not 0 < fraction <= 1:
        raise CorpusError("fraction must lie in (0, 1]")
    if min_term_freq < 0:
        raise CorpusError("min_term_freq must be non-negative")
    stream = _open_binary(docword)
    try:
        lines = _lines(stream)
        D = _header_value(lines, "D")
        W = _header_value(lines, "W")
        nnz = _header_value(lines, "NNZ")
        n_kept = math.ceil(fraction * D)
        if max_docs is not None:
            n_kept = min(n_kept, max_docs)

        raw_docs: list[dict[int, int]] = [{} for _ in range(n_kept)]
        totals = np.zeros(W, dtype=np.int64)
        seen = 0
        for lineno, text in lines:
            parts = text.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: expected 'docID wordID count', got {text!r}")
            try:
                d, w, c = (int(p) for p in parts)
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer field in {text!r}") from None
            if not 1 <= d <= D:
                raise RangeError(f"line {lineno}: docID {d} outside 1..{D}")
            if not 1 <= w <= W:
                raise RangeError(f"line {lineno}: wordID {w} outside 1..{W}")
            if c <= 0:
                raise CorpusError(f"line {lineno}: count must be positive, got {c}")
            seen += 1
            if d > n_kept:
                continue
            doc = raw_docs[d - 1]
            doc[w - 1] = doc.get(w - 1, 0) + c
            totals[w - 1] += c
        if seen != nnz:
            raise ParseError(f"header declares NNZ={nnz} but body has {seen} entries")
    finally:
        if stream is not docword:
            stream.close()

    vstream = _open_binary(vocab)
    try:
        words = read_vocab(vstream)
    finally:
        if vstream is not vocab:
            vstream.close()
    if len(words) != W:
        raise ParseError(f"vocabulary has {len(words)} terms but header declares W={W}")

    keep = np.flatnonzero(totals >= max(min_term_freq, 1))
    remap = np.full(W, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    docs = [
        {int(remap[t]): f for t, f in sorted(doc.items()) if remap[t] >= 0}
        for doc in raw_docs
    ]
    return Corpus(num_docs=n_kept, vocab=[words[i] for i in keep], docs=docs)


def load_labels(source, num_docs: int | None = None) -> list[int]:
    """One integer class per line, line i labelling document i."""
    stream = _open_binary(source)
    try:
        labels = []
        for lineno, text in _lines(stream):
            if not text.strip():
                continue
            try:
                labels.append(int(text.strip()))
            except ValueError:
                raise ParseError(f"line {lineno}: label is not an integer: {text!r}") from None
    finally:
        if stream is not source:
            stream.close()
    if num_docs is not None:
        if len(labels) < num_docs:
            raise CorpusError(f"{len(labels)} labels for {num_docs} documents")
        labels = labels[:num_docs]
    return labels


def write_uci(corpus: Corpus, docword: BinaryIO, vocab: BinaryIO) -> None:
    nnz = sum(len(doc) for doc in corpus.docs)
    out = io.TextIOWrapper(docword, encoding="utf-8", newline="\n")
    out.write(f"{corpus.num_docs}\n{corpus.vocab_size}\n{nnz}\n")
    for d, doc in enumerate(corpus.docs, start=1):
        for t in sorted(doc):
            out.write(f"{d} {t + 1} {doc[t]}\n")
    out.flush()
    out.detach()
    vocab.write("".join(w + "\n" for w in corpus.vocab).encode("utf-8"))


def build_inverted_file(corpus: Corpus) -> InvertedFile:
    V, N = corpus.vocab_size, corpus.num_docs
    counts = np.zeros(V + 1, dtype=np.int64)
    doc_sizes = np.zeros(N, dtype=np.int64)
    for d, doc in enumerate(corpus.docs):
        for t, f in doc.items():
            counts[t + 1] += 1
            doc_sizes[d] += f
    indptr = np.cumsum(counts)
    doc_ids = np.empty(indptr[-1], dtype=np.int64)
    freqs = np.empty(indptr[-1], dtype=np.int64)
    cursor = indptr[:-1].copy()
    # documents are visited in ascending order, so each posting list is sorted
    for d, doc in enumerate(corpus.docs):
        for t, f in doc.items():
            k = cursor[t]
            doc_ids[k] = d
            freqs[k] = f
            cursor[t] = k + 1
    doc_weights = np.zeros(N, dtype=np.float64)
    nonempty = doc_sizes > 0
    doc_weights[nonempty] = 1.0 / doc_sizes[nonempty]
    return InvertedFile(indptr, doc_ids, freqs, doc_sizes, doc_weights)


def from_documents(docs: Iterable[dict[int, int]], vocab: list[str]) -> Corpus:
    docs = [dict(doc) for doc in docs]
    return Corpus(len(docs), list(vocab), docs)
