"""Seeded G(n, p) sampling and bitset adjacency.

Each adjacency row is an array of ``ceil(n / 64)`` little-endian uint64 words;
bit ``u`` of row ``v`` is set iff the edge ``{u, v}`` is present.  Padding bits
past ``n`` are always zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

WORD_BITS = 64

# Below this edge probability the sampler skips over absent pairs with
# geometric jumps instead of drawing one uniform per pair.
GEOMETRIC_SKIP_BELOW = 0.05

PER_PAIR = "per-pair"
GEOMETRIC_SKIP = "geometric-skip"

_MASK64 = (1 << 64) - 1
_ROW_CHUNK_PAIRS = 1 << 22


def n_words(n: int) -> int:
    return (n + WORD_BITS - 1) // WORD_BITS


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    Attributes:
        n: Number of vertices.
        adj: Read-only ``(n, ceil(n/64))`` uint64 array of adjacency bitsets.
        p: Edge probability used when sampling (metadata only).
        seed: Seed used when sampling (metadata only).
        method: Sampling path that produced the graph.
    """

    n: int
    adj: np.ndarray
    p: float | None = None
    seed: int | None = None
    method: str | None = None
    _degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        adj = np.array(self.adj, dtype=np.uint64, order="C", copy=True)
        if adj.shape != (self.n, n_words(self.n)):
            raise ValueError(f"adjacency shape {adj.shape} does not match n={self.n}")
        adj.flags.writeable = False
        object.__setattr__(self, "adj", adj)
        deg = np.bitwise_count(adj).sum(axis=1, dtype=np.int64)
        deg.flags.writeable = False
        object.__setattr__(self, "_degrees", deg)
        _check_invariants(self)

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def edge_count(self) -> int:
        return int(self._degrees.sum()) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool((int(self.adj[u, v // WORD_BITS]) >> (v % WORD_BITS)) & 1)

    def neighbors(self, v: int) -> list[int]:
        bits = np.unpackbits(self.adj[v].view(np.uint8), bitorder="little")[: self.n]
        return np.flatnonzero(bits).tolist()

    def edges(self) -> list[tuple[int, int]]:
        """All edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        out = []
        for u in range(self.n):
            out.extend((u, v) for v in self.neighbors(u) if v > u)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adj, other.adj)

    def __hash__(self) -> int:
        return hash((self.n, self.adj.tobytes()))


def _check_invariants(g: Graph) -> None:
    n, adj = g.n, g.adj
    if n % WORD_BITS:
        pad = np.uint64(~((1 << (n % WORD_BITS)) - 1) & _MASK64)
        if np.any(adj[:, -1] & pad):
            raise ValueError("padding bits must be zero")
    idx = np.arange(n)
    diag = (adj[idx, idx // WORD_BITS] >> (idx % WORD_BITS).astype(np.uint64)) & np.uint64(1)
    if np.any(diag):
        raise ValueError("graph has a loop")
    dense = _dense(g)
    if not np.array_equal(dense, dense.T):
        raise ValueError("adjacency is not symmetric")


def _dense(g: Graph) -> np.ndarray:
    bits = np.unpackbits(g.adj.view(np.uint8), axis=1, bitorder="little")
    return bits[:, : g.n].astype(bool)


def from_edges(n: int, edges: Iterable[tuple[int, int]], **meta) -> Graph:
    """Build a graph from an iterable of vertex pairs."""
    pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if pairs.size:
        if pairs.min() < 0 or pairs.max() >= n:
            raise ValueError("edge endpoint out of range")
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise ValueError("loops are not allowed")
    return Graph(n, _pack(n, pairs[:, 0], pairs[:, 1]), **meta)


def _pack(n: int, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    adj = np.zeros((n, n_words(n)), dtype=np.uint64)
    rows = np.concatenate([us, vs])
    cols = np.concatenate([vs, us])
    bits = np.left_shift(np.uint64(1), (cols % WORD_BITS).astype(np.uint64))
    np.bitwise_or.at(adj, (rows, cols // WORD_BITS), bits)
    return adj


def complete_graph(n: int) -> Graph:
    return from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def empty_graph(n: int) -> Graph:
    return Graph(n, np.zeros((n, n_words(n)), dtype=np.uint64))


def _pair_offsets(n: int) -> np.ndarray:
    """Linear index of pair ``(u, u+1)`` in the lexicographic pair order."""
    u = np.arange(n, dtype=np.int64)
    return u * (2 * n - u - 1) // 2


def _unrank_pairs(n: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    offsets = _pair_offsets(n)
    u = np.searchsorted(offsets, idx, side="right") - 1
    v = idx - offsets[u] + u + 1
    return u, v


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def sample_gnp(n: int, p: float, seed: int, method: str | None = None) -> Graph:
    """Sample G(n, p) as a pure function of ``(n, p, seed)``.

    Pairs ``(u, v)``, ``u < v``, are visited in lexicographic order.  The
    per-pair path draws one PCG64 double per pair and keeps the edge when the
    draw is below ``p``.  For ``p < 0.05`` the default is geometric skipping,
    which jumps directly between present edges.

    Args:
        n: Number of vertices, at least 1.
        p: Edge probability in ``[0, 1]``.
        seed: Seed; reduced modulo 2**64.
        method: Force ``"per-pair"`` or ``"geometric-skip"``.

    Returns:
        The sampled graph, with the sampling path recorded in ``method``.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    n = int(n)
    if method is None:
        method = GEOMETRIC_SKIP if 0.0 < p < GEOMETRIC_SKIP_BELOW else PER_PAIR
    if method not in (PER_PAIR, GEOMETRIC_SKIP):
        raise ValueError(f"unknown sampling method {method!r}")

    total = n * (n - 1) // 2
    rng = _rng(seed)
    if p == 0.0 or total == 0:
        idx = np.empty(0, dtype=np.int64)
    elif p == 1.0:
        idx = np.arange(total, dtype=np.int64)
    elif method == PER_PAIR:
        idx = _per_pair(rng, total, p)
    else:
        idx = _geometric_skip(rng, total, p)
    us, vs = _unrank_pairs(n, idx)
    return Graph(n, _pack(n, us, vs), p=float(p), seed=int(seed), method=method)


def _per_pair(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    # Chunked draws consume the same stream as a single call.
    found = []
    for start in range(0, total, _ROW_CHUNK_PAIRS):
        size = min(_ROW_CHUNK_PAIRS, total - start)
        found.append(np.flatnonzero(rng.random(size) < p) + start)
    return np.concatenate(found)


def _geometric_skip(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    found = []
    pos = -1
    batch = max(16, int(total * p * 1.1) + 16)
    while True:
        jumps = rng.geometric(p, size=batch).astype(np.int64)
        hits = pos + np.cumsum(jumps)
        keep = hits[hits < total]
        found.append(keep)
        if keep.size < hits.size:
            break
        pos = int(hits[-1])
    return np.concatenate(found)


def vertex_set(vertices: Iterable[int], n: int) -> tuple[int, ...]:
    """Validate and canonicalize a nonempty set of vertex indices."""
    vs = tuple(sorted(int(v) for v in vertices))
    if not vs:
        raise ValueError("vertex set must be nonempty")
    if len(set(vs)) != len(vs):
        raise ValueError(f"vertex set has repeated vertices: {vs}")
    if vs[0] < 0 or vs[-1] >= n:
        raise ValueError(f"vertex out of range for n={n}: {vs}")
    return vs


def degree(g: Graph, v: int) -> int:
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range for n={g.n}")
    return int(g.degrees[v])


def common_neighbor_count(g: Graph, u_set: Sequence[int]) -> int:
    """Number of vertices outside ``u_set`` adjacent to every member of it."""
    members = vertex_set(u_set, g.n)
    acc = g.adj[members[0]].copy()
    for v in members[1:]:
        acc &= g.adj[v]
    for v in members:
        acc[v // WORD_BITS] &= ~np.uint64(1 << (v % WORD_BITS))
    return int(np.bitwise_count(acc).sum())


def dump_edge_list(g: Graph, path: str | Path | None = None) -> str:
    """Serialize as ``"n m"`` followed by one ``"u v"`` line per edge, ``u < v``."""
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="ascii")
    return text


def parse_edge_list(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty edge list")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad header line: {lines[0]!r}")
    n, m = int(header[0]), int(header[1])
    if len(lines) - 1 != m:
        raise ValueError(f"header declares {m} edges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if not u < v:
            raise ValueError(f"edge must satisfy u < v: {ln!r}")
        edges.append((u, v))
    if len(set(edges)) != len(edges):
        raise ValueError("duplicate edge")
    return from_edges(n, edges)


def load_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="ascii"))
