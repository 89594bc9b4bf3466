"""Synthetic corpora with known co-occurrence structure."""

from __future__ import annotations

import numpy as np

from .corpus import Corpus


def planted_corpus(
    num_docs: int = 2000,
    num_topics: int = 10,
    terms_per_topic: int = 20,
    background_terms: int = 5000,
    p_term: float = 0.97,
    noise_per_doc: int = 20,
    seed: int = 0,
) -> tuple[Corpus, list[list[int]]]:
    """Documents split evenly among planted topics, plus uniform background noise.

    Document ``d`` belongs to topic ``d % num_topics`` and contains each of
    that topic's terms independently with probability ``p_term``, plus
    ``noise_per_doc`` distinct background terms drawn uniformly.  Topic terms
    take ids ``[0, num_topics * terms_per_topic)``; background terms follow.
    Returns the corpus and the planted term groups.
    """
    rng = np.random.default_rng(seed)
    planted = [
        list(range(k * terms_per_topic, (k + 1) * terms_per_topic)) for k in range(num_topics)
    ]
    first_bg = num_topics * terms_per_topic
    docs = []
    for d in range(num_docs):
        group = planted[d % num_topics]
        present = rng.random(terms_per_topic) < p_term
        doc = {t: 1 for t, keep in zip(group, present) if keep}
        noise = rng.choice(background_terms, size=min(noise_per_doc, background_terms), replace=False)
        for t in noise.tolist():
            doc[first_bg + t] = int(rng.integers(1, 3))
        docs.append(dict(sorted(doc.items())))
    vocab = [f"topic{k}_{i}" for k in range(num_topics) for i in range(terms_per_topic)]
    vocab += [f"bg{i}" for i in range(background_terms)]
    return Corpus(num_docs, vocab, docs), planted


def heavy_tailed_corpus(
    num_docs: int = 2000,
    num_topics: int = 10,
    terms_per_topic: int = 20,
    background_terms: int = 3000,
    pareto_shape: float = 1.1,
    base_length: int = 10,
    max_length: int = 3000,
    seed: int = 0,
) -> tuple[Corpus, list[list[int]]]:
    """Planted topics in documents whose background length is Pareto distributed.

    Most documents are short; a few are huge and contain a large share of the
    background vocabulary, creating co-occurrence that only exists inside
    long documents.
    """
    rng = np.random.default_rng(seed)
    planted = [
        list(range(k * terms_per_topic, (k + 1) * terms_per_topic)) for k in range(num_topics)
    ]
    first_bg = num_topics * terms_per_topic
    lengths = np.minimum(max_length, base_length * (1 + rng.pareto(pareto_shape, num_docs))).astype(int)
    docs = []
    for d in range(num_docs):
        group = planted[d % num_topics]
        doc = {t: 1 for t in group if rng.random() < 0.9}
        k = min(int(lengths[d]), background_terms)
        for t in rng.choice(background_terms, size=k, replace=False).tolist():
            doc[first_bg + t] = int(rng.integers(1, 4))
        docs.append(dict(sorted(doc.items())))
    vocab = [f"topic{k}_{i}" for k in range(num_topics) for i in range(terms_per_topic)]
    vocab += [f"bg{i}" for i in range(background_terms)]
    return Corpus(num_docs, vocab, docs), planted


def topic_f1(found: set[int], planted: set[int]) -> float:
    tp = len(found & planted)
    if tp == 0:
        return 0.0
    precision, recall = tp / len(found), tp / len(planted)
    return 2 * precision * recall / (precision + recall)


def recovered_topics(topics, planted: list[list[int]]) -> list[float]:
    """Best term-F1 of any mined topic against each planted group."""
    mined = [set(t.terms) for t in topics]
    best = []
    for group in planted:
        g = set(group)
        best.append(max((topic_f1(m, g) for m in mined if m & g), default=0.0))
    return best


def block_corpus(
    num_docs: int = 50000,
    docs_per_block: int = 250,
    terms_per_topic: int = 20,
    background_per_block: int = 500,
    p_term: float = 0.97,
    noise_per_doc: int = 10,
    seed: int = 0,
) -> tuple[Corpus, list[list[int]]]:
    """Consecutive blocks of documents, each with its own topic and background pool.

    Vocabulary, co-occurring structure and work all grow with the number of
    documents, so any prefix of the corpus is a smaller corpus of the same
    kind.
    """
    rng = np.random.default_rng(seed)
    width = terms_per_topic + background_per_block
    num_blocks = -(-num_docs // docs_per_block)
    docs = []
    for d in range(num_docs):
        base = (d // docs_per_block) * width
        present = rng.random(terms_per_topic) < p_term
        doc = {base + i: 1 for i in np.flatnonzero(present).tolist()}
        noise = rng.choice(background_per_block, size=noise_per_doc, replace=False)
        for t in noise.tolist():
            doc[base + terms_per_topic + t] = int(rng.integers(1, 3))
        docs.append(dict(sorted(doc.items())))
    vocab = [
        f"b{k}_{'t' if i < terms_per_topic else 'n'}{i}" for k in range(num_blocks) for i in range(width)
    ]
    planted = [list(range(k * width, k * width + terms_per_topic)) for k in range(num_blocks)]
    return Corpus(num_docs, vocab, docs), planted
