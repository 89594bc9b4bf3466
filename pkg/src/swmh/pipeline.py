"""End-to-end topic mining: partition, cluster, assemble, rank."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .cluster import Topic, assemble_topics, candidate_pairs, cluster_sets, stage2_params
from .corpus import InvertedFile
from .evaluation import rank_topics
from .minhash import MiningParams, ParameterError
from .partition import CoTermSet, partition_vocabulary


@dataclass
class MiningResult:
    sets: list[CoTermSet]
    clusters: list[list[int]]
    topics: list[Topic]
    timings: dict[str, float] = field(default_factory=dict)


def cluster_with_duplicates(
    sets: list[CoTermSet],
    eps: float,
    stage2: MiningParams | None,
    mode: str = "minhash",
    threads: int = 1,
) -> list[list[int]]:
    """Cluster ``sets``, hashing each distinct term set only once.

    Copies of one term set have overlap 1, so for eps < 1 they always fall
    into the same component; clustering the distinct sets and expanding them
    back gives the same components as clustering every instance.
    """
    if eps >= 1.0:
        return cluster_sets(sets, eps, candidate_pairs(sets, stage2, mode, threads))
    first_seen: dict[tuple[int, ...], int] = {}
    copies: list[list[int]] = []
    for i, s in enumerate(sets):
        k = first_seen.setdefault(s.terms, len(copies))
        if k == len(copies):
            copies.append([])
        copies[k].append(i)
    distinct = [sets[c[0]] for c in copies]
    merged = cluster_sets(distinct, eps, candidate_pairs(distinct, stage2, mode, threads))
    clusters = [sorted(i for k in block for i in copies[k]) for block in merged]
    return sorted(clusters, key=lambda c: c[0])


def mine_topics(
    inv: InvertedFile,
    params: MiningParams,
    eps: float = 0.7,
    min_set_size: int = 3,
    min_cluster_size: int = 1,
    M: int = 10,
    stage2: MiningParams | None = None,
    candidates: str = "minhash",
    threads: int = 1,
) -> MiningResult:
    if not 0 < eps <= 1:
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")
    if min_cluster_size < 1:
        raise ParameterError("min_cluster_size must be >= 1")
    if stage2 is None and candidates == "minhash":
        stage2 = stage2_params(eps, params.seed)

    timings = {}
    t0 = time.perf_counter()
    sets = list(partition_vocabulary(inv, params, min_set_size, threads))
    t1 = time.perf_counter()
    clusters = cluster_with_duplicates(sets, eps, stage2, candidates, threads) if sets else []
    topics = assemble_topics(clusters, sets, inv, min_cluster_size)
    t2 = time.perf_counter()
    ranked = rank_topics(topics, inv, M)
    t3 = time.perf_counter()
    timings.update(partition=t1 - t0, cluster=t2 - t1, rank=t3 - t2)
    return MiningResult(sets, clusters, ranked, timings)
