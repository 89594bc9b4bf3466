"""Random partitions of the vocabulary into co-occurring term sets.

Every term's inverted list is min-hashed; within each of the ``l`` tables the
terms that agree on the whole r-tuple share a bucket, and buckets with at
least ``min_set_size`` terms are emitted as co-occurring term sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, TextIO

import numpy as np

from .corpus import InvertedFile
from .minhash import MiningParams, ParameterError, band_key_matrix, replica_counts, signature_matrix

# bytes of signature values materialized at once
SIGNATURE_BUDGET = 64 * 2**20


@dataclass(frozen=True)
class CoTermSet:
    terms: tuple[int, ...]
    table_index: int

    def __post_init__(self) -> None:
        if any(a >= b for a, b in zip(self.terms, self.terms[1:])):
            raise ValueError("terms must be unique and sorted ascending")

    def __len__(self) -> int:
        return len(self.terms)


def default_weight_scale(inv: InvertedFile) -> float:
    """Median size of the non-empty documents.

    Scaling the 1/size document weights by it makes a single occurrence in a
    median-sized document worth one replica at quantization 1.
    """
    sizes = inv.doc_sizes[inv.doc_sizes > 0]
    return float(np.median(sizes)) if len(sizes) else 1.0


def term_replicas(
    inv: InvertedFile, params: MiningParams, weight_scale: float | None = None
) -> np.ndarray:
    """Replica count of every posting entry (aligned with ``inv.doc_ids``)."""
    if not params.weighted:
        return np.ones(len(inv.doc_ids), dtype=np.int64)
    scale = default_weight_scale(inv) if weight_scale is None else weight_scale
    weights = inv.freqs * inv.doc_weights[inv.doc_ids] * scale
    return replica_counts(weights, params.quantization)


def _active_lists(inv: InvertedFile, replicas: np.ndarray):
    """CSR over the terms with non-empty posting lists only."""
    df = np.diff(inv.indptr)
    active = np.flatnonzero(df > 0)
    indptr = np.zeros(len(active) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(df[active])
    # posting lists of active terms are contiguous once empty ones are dropped
    return active, indptr, inv.doc_ids, replicas


def group_rows(keys: np.ndarray, tuples: np.ndarray, min_size: int = 1) -> list[np.ndarray]:
    """Rows sharing an identical tuple, for groups of at least ``min_size``.

    Keys are only a pre-filter; members of a key run are split by exact
    tuple comparison.  Each group is returned sorted ascending.
    """
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    starts = np.flatnonzero(np.concatenate(([True], sk[1:] != sk[:-1])))
    ends = np.append(starts[1:], len(sk))
    big = np.flatnonzero(ends - starts >= min_size)
    groups = []
    for i in big:
        members = order[starts[i] : ends[i]]
        tup = tuples[members]
        if (tup == tup[0]).all():
            groups.append(np.sort(members))
            continue
        split: dict[tuple, list[int]] = {}
        for m, row in zip(members.tolist(), map(tuple, tup.tolist())):
            split.setdefault(row, []).append(m)
        groups.extend(np.array(sorted(g)) for g in split.values() if len(g) >= min_size)
    return groups


def _table_blocks(inv, params, weight_scale, threads, table_range=None):
    """Yield (table_index, term ids, tuple block, key column) table by table."""
    replicas = term_replicas(inv, params, weight_scale)
    active, indptr, elems, reps = _active_lists(inv, replicas)
    if len(active) == 0:
        return
    r = params.r
    first, last = table_range if table_range is not None else (0, params.l)
    per_table = max(1, len(active) * r * 8)
    step = max(1, SIGNATURE_BUDGET // per_table)
    for t0 in range(first, last, step):
        t1 = min(last, t0 + step)
        sig = signature_matrix(indptr, elems, reps, params.seed, t0 * r, (t1 - t0) * r, threads)
        keys = band_key_matrix(sig, r, t0)
        for b in range(t1 - t0):
            yield t0 + b, active, sig[:, b * r : (b + 1) * r], keys[:, b]


def partition_vocabulary(
    inv: InvertedFile,
    params: MiningParams,
    min_set_size: int = 3,
    threads: int = 1,
    weight_scale: float | None = None,
) -> Iterator[CoTermSet]:
    """Stream the co-occurring term sets of all ``params.l`` tables.

    Order is canonical: by table, then by smallest term id.  Terms with empty
    posting lists take no part.
    """
    if min_set_size < 1:
        raise ParameterError("min_set_size must be >= 1")
    for table, active, tuples, keys in _table_blocks(inv, params, weight_scale, threads):
        groups = group_rows(keys, tuples, min_set_size)
        groups.sort(key=lambda g: g[0])
        for g in groups:
            yield CoTermSet(tuple(active[g].tolist()), table)


def table_buckets(
    inv: InvertedFile, params: MiningParams, table_index: int, weight_scale: float | None = None
) -> list[tuple[int, ...]]:
    """Every bucket of one table, singletons included, as sorted term tuples."""
    if not 0 <= table_index < params.l:
        raise IndexError(f"table index {table_index} outside 0..{params.l - 1}")
    out = []
    for _, active, tuples, keys in _table_blocks(
        inv, params, weight_scale, 1, (table_index, table_index + 1)
    ):
        out = [tuple(active[g].tolist()) for g in group_rows(keys, tuples, 1)]
    return sorted(out)


def write_coterm_sets(sets: Sequence[CoTermSet], out: TextIO) -> None:
    for s in sets:
        out.write(f"{s.table_index}\t{' '.join(map(str, s.terms))}\n")


def jcc(terms: Sequence[int], inv: InvertedFile) -> float:
    """|docs shared by all terms| / |docs containing any term|."""
    if len(terms) < 2:
        raise ParameterError("jcc needs at least two terms")
    sets = [inv.doc_set(t) for t in terms]
    union = frozenset().union(*sets)
    if not union:
        raise ParameterError("all posting lists are empty")
    return len(frozenset.intersection(*sets)) / len(union)


def wcc(terms: Sequence[int], inv: InvertedFile) -> float:
    """Weighted co-occurrence: sum_i w_i min(freqs) / sum_i w_i max(freqs)."""
    if len(terms) < 2:
        raise ParameterError("wcc needs at least two terms")
    freq_maps = [dict(inv.postings(t)) for t in terms]
    docs = set().union(*freq_maps)
    if not docs:
        raise ParameterError("all posting lists are empty")
    num = den = 0.0
    for d in docs:
        fs = [m.get(d, 0) for m in freq_maps]
        w = inv.doc_weights[d]
        num += w * min(fs)
        den += w * max(fs)
    return num / den
