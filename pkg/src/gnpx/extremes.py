"""Order statistics of common-neighbor counts over all k-subsets.

``top_m_common_neighbors`` runs a depth-first search over vertices in
descending-degree order, carrying the running intersection of adjacency
bitsets.  A partial set is abandoned once its intersection is smaller than the
current m-th best value, since adding vertices can only shrink it.  Each
level is vectorized: all remaining candidates are intersected with the
running bitset in one numpy call, and only the survivors are expanded.

Ties are broken towards the lexicographically smallest vertex set, which makes
results identical to the plain enumeration in ``brute_force_top_m``.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .graph import WORD_BITS, Graph

BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class TopM:
    """The m largest common-neighbor counts and the k-sets attaining them.

    ``truncated`` is set when fewer than ``m`` k-sets exist.
    """

    k: int
    m: int
    values: tuple[int, ...]
    witnesses: tuple[tuple[int, ...], ...]
    truncated: bool = False


@dataclass(frozen=True)
class ExceedanceCount:
    k: int
    threshold: float
    count: int


def _check_k(g: Graph, k: int) -> None:
    if not 1 <= k < g.n:
        raise ValueError(f"k must satisfy 1 <= k < n={g.n}, got {k}")


def _check_m(m: int) -> None:
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")


def _full_mask(n: int) -> np.ndarray:
    mask = np.zeros(-(-n // WORD_BITS), dtype=np.uint64)
    mask[: n // WORD_BITS] = np.uint64(0xFFFFFFFFFFFFFFFF)
    if n % WORD_BITS:
        mask[-1] = np.uint64((1 << (n % WORD_BITS)) - 1)
    return mask


def _clear(bits: np.ndarray, v: int) -> None:
    bits[v // WORD_BITS] &= ~np.uint64(1 << (v % WORD_BITS))


def _search_order(g: Graph) -> np.ndarray:
    # Descending degree, ties by vertex index.
    return np.lexsort((np.arange(g.n), -g.degrees))


class _Best:
    """Sorted list of the ``size`` best ``(value, witness)`` pairs."""

    def __init__(self, size: int):
        self.size = size
        self.items: list[tuple[int, tuple[int, ...]]] = []

    @property
    def full(self) -> bool:
        return len(self.items) >= self.size

    @property
    def floor(self) -> int:
        """Smallest value that can still enter (ties may displace by witness)."""
        return -self.items[-1][0] if self.full else -1

    def offer(self, counts: np.ndarray, cands: np.ndarray, chosen: list[int]) -> None:
        if self.full:
            keep = counts >= self.floor
            counts, cands = counts[keep], cands[keep]
        if counts.size > self.size:
            # Anything below the size-th largest count cannot enter.
            cut = np.partition(counts, counts.size - self.size)[counts.size - self.size]
            keep = counts >= cut
            counts, cands = counts[keep], cands[keep]
        if not counts.size:
            return
        fresh = [(-int(c), tuple(sorted(chosen + [int(v)]))) for c, v in zip(counts, cands)]
        self.items = heapq.nsmallest(self.size, itertools.chain(self.items, fresh))


def top_m_common_neighbors(g: Graph, k: int, m: int) -> TopM:
    """The ``m`` largest values of ``|N(U)|`` over all k-subsets ``U``.

    Order statistics are taken over the multiset of ``C(n, k)`` values, one
    per k-set.  When ``m > C(n, k)`` all values are returned and the result
    is flagged as truncated.
    """
    _check_k(g, k)
    _check_m(m)
    total = math.comb(g.n, k)
    best = _Best(min(m, total))
    order = _search_order(g)
    rows = g.adj
    n = g.n

    def descend(start: int, chosen: list[int], inter: np.ndarray) -> None:
        cands = order[start:]
        counts = np.bitwise_count(rows[cands] & inter).sum(axis=1, dtype=np.int64)
        if len(chosen) == k - 1:
            best.offer(counts, cands, chosen)
            return
        # Candidate i still needs k - 1 - depth vertices after it.
        stop = cands.size - (k - 1 - len(chosen))
        for i in range(stop):
            # Re-read the floor: it rises as the search proceeds.
            if best.full and counts[i] < best.floor:
                if not chosen:
                    # Top level counts are degrees in descending order.
                    break
                continue
            v = int(cands[i])
            nxt = inter & rows[v]
            _clear(nxt, v)
            chosen.append(v)
            descend(start + i + 1, chosen, nxt)
            chosen.pop()

    descend(0, [], _full_mask(n))
    return TopM(
        k=k,
        m=m,
        values=tuple(-v for v, _ in best.items),
        witnesses=tuple(w for _, w in best.items),
        truncated=m > total,
    )


def brute_force_top_m(g: Graph, k: int, m: int) -> TopM:
    """Enumerate every k-subset in lexicographic order; the reference oracle.

    Uses Python integer bitsets built from neighbor lists, independent of the
    packed-word path used by the search.
    """
    _check_k(g, k)
    _check_m(m)
    total = math.comb(g.n, k)
    if total > BRUTE_FORCE_LIMIT:
        raise ValueError(f"C({g.n},{k}) = {total} exceeds the enumeration guard {BRUTE_FORCE_LIMIT}")
    nbrs = [sum(1 << u for u in g.neighbors(v)) for v in range(g.n)]
    everyone = (1 << g.n) - 1

    def count(u_set: tuple[int, ...]) -> int:
        acc = everyone
        for v in u_set:
            acc &= nbrs[v]
        for v in u_set:
            acc &= ~(1 << v)
        return acc.bit_count()

    scored = ((-count(u), u) for u in itertools.combinations(range(g.n), k))
    best = heapq.nsmallest(min(m, total), scored)
    return TopM(
        k=k,
        m=m,
        values=tuple(-v for v, _ in best),
        witnesses=tuple(u for _, u in best),
        truncated=m > total,
    )


def count_exceedances(g: Graph, k: int, threshold: float) -> ExceedanceCount:
    """Count k-sets with strictly more than ``threshold`` common neighbors.

    The comparison is ``integer_count > threshold`` with no rounding of the
    threshold.  Partial sets whose intersection already fails the test are
    pruned.
    """
    _check_k(g, k)
    threshold = float(threshold)
    if math.isnan(threshold):
        raise ValueError("threshold must not be NaN")
    order = _search_order(g)
    rows = g.adj
    n = g.n
    total = 0

    def descend(start: int, depth: int, inter: np.ndarray) -> None:
        nonlocal total
        cands = order[start:]
        counts = np.bitwise_count(rows[cands] & inter).sum(axis=1, dtype=np.int64)
        if depth == k - 1:
            total += int(np.count_nonzero(counts > threshold))
            return
        stop = cands.size - (k - 1 - depth)
        for i in np.flatnonzero(counts[:stop] > threshold):
            v = int(cands[i])
            nxt = inter & rows[v]
            _clear(nxt, v)
            descend(start + int(i) + 1, depth + 1, nxt)

    descend(0, 0, _full_mask(n))
    return ExceedanceCount(k=k, threshold=threshold, count=total)


def count_ell_exceedances(g: Graph, ell: int, gamma: float) -> ExceedanceCount:
    """``count_exceedances`` for ell-sets, used with the cutoff ``gamma_ell``."""
    return count_exceedances(g, ell, gamma)
