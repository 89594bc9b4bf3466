"""Seeded MinHash signatures for plain and weighted sets.

Weighted sets are handled by quantization: an element of weight ``w`` is
expanded into ``max(1, round(w * Q))`` unit sub-elements, each hashed
independently.  The probability that two sets agree on one MinHash value is
then the Jaccard similarity of the expanded sets, i.e. the generalized
(min/max) Jaccard of the quantized weights.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels


class ParameterError(ValueError):
    pass


def compute_tables(s_star: float, r: int) -> int:
    """Number of tables putting the collision probability at 0.5 for ``s_star``."""
    if not 0.0 < s_star < 1.0:
        raise ParameterError(f"s_star must lie in (0, 1), got {s_star}")
    if r < 1:
        raise ParameterError(f"r must be >= 1, got {r}")
    l = math.log(0.5) / math.log1p(-(s_star**r))
    return max(1, int(math.floor(l + 0.5)))


def collision_probability(sim: float, r: int, l: int) -> float:
    """P(at least one of ``l`` r-tuples agrees) for sets of similarity ``sim``."""
    return 1.0 - (1.0 - sim**r) ** l


@dataclass(frozen=True)
class MiningParams:
    r: int = 3
    l: int = 693
    s_star: float = 0.10
    quantization: int = 1
    seed: int = 0
    weighted: bool = True

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ParameterError(f"r must be >= 1, got {self.r}")
        if self.l < 1:
            raise ParameterError(f"l must be >= 1, got {self.l}")
        if not 0.0 < self.s_star < 1.0:
            raise ParameterError(f"s_star must lie in (0, 1), got {self.s_star}")
        if self.quantization < 1:
            raise ParameterError(f"quantization must be >= 1, got {self.quantization}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must fit in 64 unsigned bits")

    @classmethod
    def from_threshold(cls, s_star: float = 0.10, r: int = 3, **kwargs) -> "MiningParams":
        return cls(r=r, l=compute_tables(s_star, r), s_star=s_star, **kwargs)

    @property
    def num_functions(self) -> int:
        return self.l * self.r


@dataclass(frozen=True)
class WeightedMultiset:
    """Distinct element ids with strictly positive weights."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        ids = [e for e, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ParameterError("element ids must be distinct")
        for e, w in self.entries:
            if e < 0:
                raise ParameterError(f"element id must be non-negative, got {e}")
            if not w > 0:
                raise ParameterError(f"element {e} has non-positive weight {w}")

    @classmethod
    def from_mapping(cls, weights: Mapping[int, float]) -> "WeightedMultiset":
        return cls(tuple(sorted(weights.items())))

    @classmethod
    def from_elements(cls, elements: Iterable[int]) -> "WeightedMultiset":
        return cls(tuple((int(e), 1.0) for e in sorted(set(elements))))

    def __len__(self) -> int:
        return len(self.entries)


def replica_counts(weights, quantization: int) -> np.ndarray:
    """max(1, round(w * Q)) with halves rounded up."""
    w = np.asarray(weights, dtype=np.float64)
    return np.maximum(1, np.floor(w * quantization + 0.5)).astype(np.int64)


@dataclass(frozen=True)
class MinHashSignature:
    values: np.ndarray
    r: int
    l: int

    def __post_init__(self) -> None:
        if self.values.shape != (self.l * self.r,):
            raise ParameterError(f"expected {self.l * self.r} values, got {self.values.shape}")

    def tuple(self, table_index: int) -> tuple[int, ...]:
        if not 0 <= table_index < self.l:
            raise IndexError(f"table index {table_index} outside 0..{self.l - 1}")
        r = self.r
        return tuple(int(v) for v in self.values[table_index * r : (table_index + 1) * r])

    def __eq__(self, other) -> bool:
        if not isinstance(other, MinHashSignature):
            return NotImplemented
        return (self.r, self.l) == (other.r, other.l) and np.array_equal(self.values, other.values)

    __hash__ = None


def _row_chunks(n: int, threads: int) -> list[tuple[int, int]]:
    parts = max(1, min(n, threads * 4 if threads > 1 else 1))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def signature_matrix(
    indptr: np.ndarray,
    elements: np.ndarray,
    replicas: np.ndarray,
    seed: int,
    first_function: int,
    num_functions: int,
    threads: int = 1,
) -> np.ndarray:
    """MinHash values of a CSR collection of expanded sets.

    Row ``s`` covers ``elements[indptr[s]:indptr[s+1]]`` with the given
    replica counts; column ``j`` is hash function ``first_function + j``.
    Rows are split across ``threads`` workers; the result does not depend on
    the split.
    """
    n = len(indptr) - 1
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    elements = np.ascontiguousarray(elements, dtype=np.int64)
    replicas = np.ascontiguousarray(replicas, dtype=np.int64)
    keys = _kernels.function_keys(np.uint64(seed), first_function, num_functions)
    out = np.empty((n, num_functions), dtype=np.uint64)
    chunks = _row_chunks(n, threads)
    if threads <= 1 or len(chunks) == 1:
        for lo, hi in chunks:
            _kernels.signature_rows(indptr, elements, replicas, keys, lo, hi, out)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_kernels.signature_rows, indptr, elements, replicas, keys, lo, hi, out)
                for lo, hi in chunks
            ]
            for f in futures:
                f.result()
    return out


def minhash_signature(mset: WeightedMultiset, params: MiningParams) -> MinHashSignature:
    if len(mset) == 0:
        raise ParameterError("cannot sign an empty multiset")
    elems = np.array([e for e, _ in mset.entries], dtype=np.int64)
    if params.weighted:
        reps = replica_counts([w for _, w in mset.entries], params.quantization)
    else:
        reps = np.ones(len(elems), dtype=np.int64)
    indptr = np.array([0, len(elems)], dtype=np.int64)
    values = signature_matrix(indptr, elems, reps, params.seed, 0, params.num_functions)[0]
    return MinHashSignature(values, params.r, params.l)


def tuple_key(sig: MinHashSignature, table_index: int) -> int:
    if not 0 <= table_index < sig.l:
        raise IndexError(f"table index {table_index} outside 0..{sig.l - 1}")
    lo = table_index * sig.r
    out = np.empty((1, 1), dtype=np.uint64)
    _kernels.band_keys(sig.values[lo : lo + sig.r].reshape(1, -1), sig.r, table_index, out)
    return int(out[0, 0])


def band_key_matrix(sig: np.ndarray, r: int, first_table: int = 0) -> np.ndarray:
    """Keys for every r-tuple of every row of a signature block."""
    n, width = sig.shape
    if width % r:
        raise ParameterError(f"signature width {width} is not a multiple of r={r}")
    out = np.empty((n, width // r), dtype=np.uint64)
    _kernels.band_keys(np.ascontiguousarray(sig), r, first_table, out)
    return out


def estimate_similarity(sig_a: MinHashSignature, sig_b: MinHashSignature) -> float:
    if sig_a.values.shape != sig_b.values.shape:
        raise ParameterError("signatures have different lengths")
    return float(np.count_nonzero(sig_a.values == sig_b.values)) / len(sig_a.values)


def generalized_jaccard(a: Mapping[int, float], b: Mapping[int, float]) -> float:
    """sum(min) / sum(max) over the union of keys (absent keys weigh 0)."""
    keys = set(a) | set(b)
    den = sum(max(a.get(k, 0.0), b.get(k, 0.0)) for k in keys)
    if den == 0:
        raise ParameterError("both weightings are empty")
    return sum(min(a.get(k, 0.0), b.get(k, 0.0)) for k in keys) / den


def quantized_weights(mset: WeightedMultiset, quantization: int) -> dict[int, int]:
    reps = replica_counts([w for _, w in mset.entries], quantization)
    return {e: int(k) for (e, _), k in zip(mset.entries, reps)}


def signatures_for(
    msets: Sequence[WeightedMultiset], params: MiningParams, threads: int = 1
) -> list[MinHashSignature]:
    """Batch form of :func:`minhash_signature`."""
    if any(len(m) == 0 for m in msets):
        raise ParameterError("cannot sign an empty multiset")
    indptr = np.zeros(len(msets) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(m) for m in msets])
    elems = np.fromiter((e for m in msets for e, _ in m.entries), dtype=np.int64, count=indptr[-1])
    if params.weighted:
        w = np.fromiter((w for m in msets for _, w in m.entries), dtype=np.float64, count=indptr[-1])
        reps = replica_counts(w, params.quantization)
    else:
        reps = np.ones(indptr[-1], dtype=np.int64)
    mat = signature_matrix(indptr, elems, reps, params.seed, 0, params.num_functions, threads)
    return [MinHashSignature(row, params.r, params.l) for row in mat]
