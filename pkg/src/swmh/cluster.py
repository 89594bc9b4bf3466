"""Agglomeration of co-occurring term sets into topics.

Pairs of term sets whose overlap coefficient exceeds ``eps`` become edges of
a graph; each connected component is one topic.  Candidate pairs come either
from all pairs (exact) or from a second, unweighted Min-Hashing pass over the
term sets, and every candidate is verified exactly before it becomes an edge.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .corpus import InvertedFile
from .minhash import MiningParams, ParameterError, band_key_matrix, compute_tables, signature_matrix
from .partition import CoTermSet, group_rows

STAGE2_SEED_SALT = 0x5DEECE66D


@dataclass(frozen=True)
class Topic:
    terms: tuple[int, ...]
    support: int
    score: float = 0.0

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a topic needs at least one term")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError("topic terms must be unique")
        if self.support < 1:
            raise ValueError("support must be >= 1")

    def __len__(self) -> int:
        return len(self.terms)


def _terms(s) -> frozenset:
    return frozenset(s.terms if isinstance(s, CoTermSet) else s)


def overlap_coefficient(c1, c2) -> float:
    a, b = _terms(c1), _terms(c2)
    if not a or not b:
        raise ParameterError("overlap of an empty set is undefined")
    return len(a & b) / min(len(a), len(b))


def stage2_params(
    eps: float, seed: int = 0, r: int = 3, s_star: float | None = None, miss: float = 1e-3
) -> MiningParams:
    """Unweighted parameters for candidate generation over term sets.

    By default the table count is the smallest one for which a pair with
    Jaccard similarity ``eps`` is missed with probability at most ``miss``.
    Jaccard never exceeds the overlap coefficient, so such pairs are always
    edges.  An explicit ``s_star`` instead places the 0.5 collision point.
    """
    if r < 1:
        raise ParameterError(f"r must be >= 1, got {r}")
    if s_star is None:
        if not 0.0 < miss < 1.0:
            raise ParameterError(f"miss must lie in (0, 1), got {miss}")
        p = min(max(eps, 1e-6), 1 - 1e-6) ** r
        l = max(1, math.ceil(math.log(miss) / math.log1p(-p)))
        s = (1.0 - 0.5 ** (1.0 / l)) ** (1.0 / r)
    else:
        s = s_star
        l = compute_tables(s, r)
    return MiningParams(r=r, l=l, s_star=s, seed=(seed ^ STAGE2_SEED_SALT) % 2**64, weighted=False)


def _incidence(sets: Sequence) -> sp.csr_matrix:
    rows = [sorted(_terms(s)) for s in sets]
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r in rows])
    indices = np.fromiter(itertools.chain.from_iterable(rows), dtype=np.int64, count=indptr[-1])
    width = int(indices.max()) + 1 if len(indices) else 1
    return sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(len(rows), width))


def _unique_pairs(left: np.ndarray, right: np.ndarray, n: int) -> np.ndarray:
    lo, hi = np.minimum(left, right), np.maximum(left, right)
    code = np.unique(lo * n + hi)
    return np.stack([code // n, code % n], axis=1)


def candidate_pairs(
    sets: Sequence,
    stage2: MiningParams | None = None,
    mode: str = "minhash",
    threads: int = 1,
) -> np.ndarray:
    """Index pairs (i < j) worth verifying, as an (P, 2) array without repeats."""
    n = len(sets)
    if mode == "exact":
        if n < 2:
            return np.empty((0, 2), dtype=np.int64)
        i, j = np.triu_indices(n, k=1)
        return np.stack([i, j], axis=1).astype(np.int64)
    if mode != "minhash":
        raise ParameterError(f"unknown candidate mode {mode!r}")
    if stage2 is None:
        raise ParameterError("minhash mode needs stage-2 parameters")
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    mat = _incidence(sets)
    indptr = mat.indptr.astype(np.int64)
    elems = mat.indices.astype(np.int64)
    sig = signature_matrix(
        indptr, elems, np.ones(len(elems), dtype=np.int64), stage2.seed, 0, stage2.num_functions, threads
    )
    r = stage2.r
    keys = band_key_matrix(sig, r)
    left, right = [], []
    for b in range(stage2.l):
        for g in group_rows(keys[:, b], sig[:, b * r : (b + 1) * r], 2):
            i, j = np.triu_indices(len(g), k=1)
            left.append(g[i])
            right.append(g[j])
    if not left:
        return np.empty((0, 2), dtype=np.int64)
    return _unique_pairs(np.concatenate(left), np.concatenate(right), n)


def verified_edges(sets: Sequence, eps: float, pairs, chunk: int = 1 << 18) -> np.ndarray:
    """The subset of ``pairs`` whose overlap coefficient is strictly above ``eps``."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        return pairs
    mat = _incidence(sets)
    sizes = np.diff(mat.indptr)
    keep = []
    for lo in range(0, len(pairs), chunk):
        p = pairs[lo : lo + chunk]
        inter = np.asarray(mat[p[:, 0]].multiply(mat[p[:, 1]]).sum(axis=1)).ravel()
        denom = np.minimum(sizes[p[:, 0]], sizes[p[:, 1]])
        keep.append(p[inter / denom > eps])
    return np.concatenate(keep)


def components(n: int, edges: np.ndarray) -> list[list[int]]:
    """Connected components (singletons included), ordered by smallest member."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    roots = _kernels.union_find_roots(
        n, np.ascontiguousarray(edges[:, 0]), np.ascontiguousarray(edges[:, 1])
    )
    groups: dict[int, list[int]] = {}
    for i, root in enumerate(roots.tolist()):
        groups.setdefault(root, []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def cluster_sets(sets: Sequence, eps: float, pairs) -> list[list[int]]:
    if not 0 < eps <= 1:
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")
    return components(len(sets), verified_edges(sets, eps, pairs))


def _order_terms(member_sets: Iterable, inv: InvertedFile) -> tuple[int, ...]:
    counts = Counter(t for s in member_sets for t in _terms(s))
    return tuple(sorted(counts, key=lambda t: (-counts[t], -inv.doc_freq(t), t)))


def assemble_topics(
    clusters: Sequence[Sequence[int]],
    sets: Sequence,
    inv: InvertedFile,
    min_cluster_size: int = 1,
) -> list[Topic]:
    """One topic per cluster of at least ``min_cluster_size`` member sets.

    Terms are ordered by how many member sets contain them, then by
    document frequency (descending), then by term id.
    """
    topics = []
    for cluster in clusters:
        if len(cluster) < min_cluster_size:
            continue
        topics.append(Topic(_order_terms([sets[i] for i in cluster], inv), support=len(cluster)))
    return topics


def chain_violations(sets: Sequence, clusters: Sequence[Sequence[int]], eps: float) -> list[tuple[int, int]]:
    """(cluster index, set index) of members with no neighbour above ``eps``."""
    bad = []
    for ci, cluster in enumerate(clusters):
        if len(cluster) < 2:
            continue
        for i in cluster:
            if not any(overlap_coefficient(sets[i], sets[j]) > eps for j in cluster if j != i):
                bad.append((ci, i))
    return bad


def is_refinement(fine: Sequence[Sequence[int]], coarse: Sequence[Sequence[int]]) -> bool:
    """True when every block of ``fine`` lies inside one block of ``coarse``."""
    owner = {i: k for k, block in enumerate(coarse) for i in block}
    return all(len({owner[i] for i in block}) == 1 for block in fine)
