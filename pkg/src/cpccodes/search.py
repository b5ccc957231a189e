"""Exhaustive and random discovery of CPC codes.

Candidate codes are addressed by their compact integer index (see
:func:`cpccodes.model.to_index`), so a search is a sweep over an integer range.
Syndromes are computed for whole blocks of indices at once with numpy bit
operations: every syndrome is an ``m``-bit word, so a code's single-qubit
syndrome table is a handful of small-integer arrays.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Iterable, Iterator, Sequence

import numpy as np

from cpccodes.model import (
    MODES,
    AdjacencyTriple,
    alphabet,
    cpc_gate_count,
    from_index,
    from_json,
    index_bits,
    to_index,
    to_json,
)

DEFAULT_CHUNK = 1 << 22


def hamming_bound_kmax(n: int, d: int, errset_size: int) -> int:
    """Largest k with sum_{j<=(d-1)/2} C(n,j) |E|^j 2^k <= 2^n (0 if none)."""
    if n < 1:
        raise ValueError("n must be positive")
    if d < 1 or d % 2 == 0:
        raise ValueError("distance must be odd and >= 1")
    if errset_size not in (2, 3):
        raise ValueError("error alphabet size must be 2 or 3")
    volume = sum(math.comb(n, j) * errset_size**j for j in range((d - 1) // 2 + 1))
    k = 0
    while k < n and volume * 2 ** (k + 1) <= 2**n:
        k += 1
    return k if volume * 2**k <= 2**n else 0


@dataclass(frozen=True)
class SearchSpec:
    k: int
    m: int
    errset: str = "xz"
    mode: str = "correct"
    lo: int = 0
    hi: int | None = None
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self) -> None:
        alphabet(self.errset)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.k < 0 or self.m < 1:
            raise ValueError("need k >= 0 and m >= 1")
        size = self.space_size
        hi = size if self.hi is None else self.hi
        if not 0 <= self.lo <= hi <= size:
            raise ValueError(f"range [{self.lo}, {hi}) outside [0, {size})")
        if self.chunk < 1:
            raise ValueError("chunk must be positive")
        object.__setattr__(self, "hi", hi)

    @property
    def space_size(self) -> int:
        return 1 << index_bits(self.k, self.m)

    def split(self, parts: int) -> list[SearchSpec]:
        """Disjoint consecutive sub-ranges covering this one."""
        bounds = np.linspace(self.lo, self.hi, parts + 1).astype(np.int64)
        return [
            SearchSpec(self.k, self.m, self.errset, self.mode, int(a), int(b), self.chunk)
            for a, b in zip(bounds[:-1], bounds[1:])
        ]


@dataclass
class CodeRecord:
    """A code plus the metrics collected by the design stages."""

    triple: AdjacencyTriple
    index: int | None = None
    cpc_count: int = 0
    swap_count: int | None = None
    local_count: int | None = None
    local_unsimplified: int | None = None
    l_total: int | None = None
    r_weighted: float | None = None
    canonical_key: int | None = None

    @classmethod
    def from_triple(cls, t: AdjacencyTriple, index: int | None = None) -> CodeRecord:
        return cls(t, to_index(t) if index is None else index, cpc_gate_count(t))

    @property
    def two_qubit_count(self) -> int | None:
        return None if self.swap_count is None else self.cpc_count + self.swap_count

    def finish(self) -> None:
        if None not in (self.swap_count, self.local_count):
            self.l_total = self.cpc_count + self.swap_count + self.local_count

    def to_json(self) -> dict:
        out = {"code": to_json(self.triple)}
        for f in fields(self):
            if f.name != "triple":
                out[f.name] = getattr(self, f.name)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> CodeRecord:
        t = from_json(obj["code"])
        kw = {f.name: obj.get(f.name) for f in fields(cls) if f.name != "triple"}
        if kw["cpc_count"] is None:
            kw["cpc_count"] = cpc_gate_count(t)
        return cls(t, **kw)


# ----------------------------------------------------------------------------
# vectorised syndromes


def _word_dtype(m: int):
    return np.uint8 if m <= 8 else np.uint16 if m <= 16 else np.uint32


def batch_syndromes(indices: np.ndarray, k: int, m: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """X and Z syndrome words for every qubit of every indexed code.

    Returns two lists of length n; entry q holds one m-bit word per index
    (bit j = parity qubit j).  Parity-qubit X syndromes are constant unit words.
    """
    it = np.uint32 if index_bits(k, m) <= 32 else np.uint64
    idx = np.asarray(indices).astype(it, copy=False)
    dt = _word_dtype(m)
    mask = it((1 << m) - 1)
    km = k * m
    mb = [((idx >> it(r * m)) & mask).astype(dt) for r in range(k)]
    mp = [((idx >> it(km + r * m)) & mask).astype(dt) for r in range(k)]
    pairs = [(u, v) for u in range(m) for v in range(u + 1, m)]
    cross = [((idx >> it(2 * km + t)) & it(1)).astype(dt) for t in range(len(pairs))]
    pz = []
    for j in range(m):
        s = np.zeros(idx.shape, dt)
        for i in range(k):
            s ^= mb[i] * ((mp[i] >> dt(j)) & dt(1))
        for t, (u, v) in enumerate(pairs):
            if u == j:
                s ^= cross[t] << dt(v)
            elif v == j:
                s ^= cross[t] << dt(u)
        pz.append(s)
    px = [np.full(idx.shape, 1 << j, dt) for j in range(m)]
    return mb + px, mp + pz


def batch_valid(indices: np.ndarray, k: int, m: int, errset: str = "xz", mode: str = "correct") -> np.ndarray:
    """Boolean mask of codes whose single-qubit syndromes pass ``mode``."""
    letters = alphabet(errset)
    sx, sz = batch_syndromes(indices, k, m)
    synd = []
    for q in range(k + m):
        for ch in letters:
            synd.append({"X": sx[q], "Z": sz[q], "Y": sx[q] ^ sz[q]}[ch])
    n_idx = np.asarray(indices).shape[0]
    if not synd:
        return np.ones(n_idx, bool)
    nonzero = np.ones(n_idx, bool)
    for s in synd:
        nonzero &= s != 0
    if mode == "detect":
        return nonzero
    if len(synd) >= 1 << m:
        return np.zeros(n_idx, bool)
    if m <= 6:
        # one-hot mask of the syndrome values: distinct iff no collisions
        st = np.uint16 if m <= 4 else np.uint32 if m == 5 else np.uint64
        seen = np.zeros(n_idx, st)
        for s in synd:
            seen |= st(1) << s.astype(st)
        return nonzero & (np.bitwise_count(seen) == len(synd))
    stacked = np.sort(np.stack(synd, axis=1), axis=1)
    return nonzero & np.all(stacked[:, 1:] != stacked[:, :-1], axis=1)


def _valid_in_range(spec: SearchSpec) -> np.ndarray:
    out = []
    for lo in range(spec.lo, spec.hi, spec.chunk):
        hi = min(lo + spec.chunk, spec.hi)
        idx = np.arange(lo, hi, dtype=np.uint64)
        ok = batch_valid(idx, spec.k, spec.m, spec.errset, spec.mode)
        out.append(idx[ok])
    if not out:
        return np.zeros(0, np.uint64)
    return np.concatenate(out)


def valid_indices(spec: SearchSpec, workers: int = 1) -> np.ndarray:
    """Ascending indices in ``[spec.lo, spec.hi)`` of codes passing validity.

    With ``workers > 1`` the range is split into equal consecutive parts
    handled by separate processes; results are concatenated in range order so
    the output never depends on the worker count.
    """
    if workers <= 1 or spec.hi - spec.lo <= spec.chunk:
        return _valid_in_range(spec)
    parts = spec.split(max(workers * 4, 1))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(_valid_in_range, parts)))


def enumerate_codes(spec: SearchSpec, workers: int = 1) -> Iterator[CodeRecord]:
    """Stream a record for every valid code in the range, in index order."""
    for v in valid_indices(spec, workers):
        v = int(v)
        t = from_index(v, spec.k, spec.m)
        yield CodeRecord(t, v, cpc_gate_count(t))


def random_search(
    k: int,
    m: int,
    samples: int,
    seed: int,
    errset: str = "xz",
    mode: str = "correct",
    batch: int = 1 << 16,
) -> tuple[np.ndarray, dict]:
    """Sample ``samples`` uniformly random indices and keep the valid ones.

    Returns the sorted unique valid indices and a metadata dict recording the
    seed and sample count.
    """
    rng = np.random.default_rng(seed)
    bits = index_bits(k, m)
    found = []
    left = samples
    while left > 0:
        n = min(batch, left)
        idx = rng.integers(0, 1 << bits, size=n, dtype=np.uint64)
        found.append(idx[batch_valid(idx, k, m, errset, mode)])
        left -= n
    valid = np.unique(np.concatenate(found)) if found else np.zeros(0, np.uint64)
    meta = {"seed": seed, "samples": samples, "k": k, "m": m, "errset": errset, "mode": mode}
    return valid, meta


# ----------------------------------------------------------------------------
# symmetry


def _bit_maps(k: int, m: int) -> Iterator[np.ndarray]:
    """For each (data, parity) permutation, where each index bit moves to."""
    km = k * m
    pairs = [(u, v) for u in range(m) for v in range(u + 1, m)]
    pair_pos = {p: 2 * km + t for t, p in enumerate(pairs)}
    for sigma in itertools.permutations(range(k)):
        for tau in itertools.permutations(range(m)):
            inv_s = np.argsort(sigma)
            inv_t = np.argsort(tau)
            dest = np.zeros(index_bits(k, m), np.int64)
            for r in range(k):
                for c in range(m):
                    new = inv_s[r] * m + inv_t[c]
                    dest[r * m + c] = new
                    dest[km + r * m + c] = km + new
            for (u, v), pos in pair_pos.items():
                a, b = sorted((inv_t[u], inv_t[v]))
                dest[pos] = pair_pos[(a, b)]
            yield dest


def canonical_keys(indices: np.ndarray, k: int, m: int) -> np.ndarray:
    """Minimum compact index over the orbit of each code under S_k x S_m."""
    idx = np.asarray(indices, dtype=np.uint64)
    bits = [(idx >> np.uint64(b)) & np.uint64(1) for b in range(index_bits(k, m))]
    best = None
    for dest in _bit_maps(k, m):
        key = np.zeros(idx.shape, np.uint64)
        for b, d in enumerate(dest):
            key |= bits[b] << np.uint64(d)
        best = key if best is None else np.minimum(best, key)
    return idx.copy() if best is None else best


def canonical_form(t: AdjacencyTriple) -> int:
    """Orbit representative key; two codes are equivalent iff keys match.

    Equivalence is relabelling data qubits among themselves and parity qubits
    among themselves.
    """
    return int(canonical_keys(np.array([to_index(t)], np.uint64), t.k, t.m)[0])


# ----------------------------------------------------------------------------
# statistics


HISTOGRAM_METRICS = ("cpc_count", "l_total", "local_count", "local_unsimplified", "two_qubit_count", "swap_count")


@dataclass
class Histogram:
    metric: str
    bins: dict[int, int] = field(default_factory=dict)
    minimum: int | None = None
    median: int | None = None

    @property
    def total(self) -> int:
        return sum(self.bins.values())

    @property
    def count_at_minimum(self) -> int:
        return 0 if self.minimum is None else self.bins[self.minimum]

    def to_csv(self) -> str:
        return "bin,count\n" + "".join(f"{b},{c}\n" for b, c in sorted(self.bins.items()))


def lower_median(values: Sequence[int] | np.ndarray) -> int:
    """Median of a multiset; for even sizes the lower middle element."""
    arr = np.sort(np.asarray(values))
    if arr.size == 0:
        raise ValueError("median of an empty collection")
    return int(arr[(arr.size - 1) // 2])


def histogram_of(metric: str, values: Iterable[int]) -> Histogram:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.int64)
    h = Histogram(metric)
    if arr.size:
        uniq, counts = np.unique(arr, return_counts=True)
        h.bins = {int(u): int(c) for u, c in zip(uniq, counts)}
        h.minimum = int(uniq[0])
        h.median = lower_median(arr)
    return h


def histogram(records: Iterable[CodeRecord], metric: str) -> Histogram:
    if metric not in HISTOGRAM_METRICS:
        raise ValueError(f"metric must be one of {HISTOGRAM_METRICS}")
    values = []
    for r in records:
        v = getattr(r, metric)
        if v is None:
            raise ValueError(f"metric {metric!r} is not populated on record {r.index}")
        values.append(v)
    return histogram_of(metric, values)
