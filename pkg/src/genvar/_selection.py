"""Search kernels shared by the variation functionals.

Every functional reduces to choosing pairwise nonoverlapping items (grid
intervals or grid rectangles) with nonnegative weights ``w`` to maximize the
sorted pairing ``sum_i w_(i) * c_i``, where ``w_(1) >= w_(2) >= ...`` and
``c`` is nonincreasing and nonnegative (``c_i = 1 / lambda_i``; ``c = 1`` for
Phi-sums; ``c = (1,..,1,0,..)`` for moduli of variation).

Adding an item never lowers that objective, so for intervals the maximum is
attained on a partition of the node range; exhaustive search enumerates the
``2**(P-2)`` partitions of ``P`` nodes.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

# relative improvement below which a greedy move is not taken
_GAIN_TOL = 1e-13


def sorted_pairing(magnitudes, c: np.ndarray) -> float:
    """``sum_i m_(i) c_i`` with magnitudes sorted in decreasing order."""
    m = np.sort(np.asarray(magnitudes, dtype=float))[::-1]
    if m.size > c.size:
        raise ValueError(f"{m.size} magnitudes but only {c.size} rank weights")
    return math.fsum(m * c[: m.size])


def pairing_order(magnitudes) -> np.ndarray:
    """Indices of ``magnitudes`` in rank order (largest first, stable)."""
    m = np.asarray(magnitudes, dtype=float)
    return np.argsort(-m, kind="stable")


@lru_cache(maxsize=None)
def partitions(n_nodes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All partitions of nodes ``0..n_nodes-1`` into consecutive intervals.

    Returns ``(left, right, valid)`` arrays of shape
    ``(2**(n_nodes-2), n_nodes-1)``; unused slots have ``valid = False``.
    """
    if n_nodes < 2:
        z = np.zeros((1, 0), dtype=np.int64)
        return z, z, z.astype(bool)
    inner = n_nodes - 2
    count = 1 << inner
    left = np.zeros((count, n_nodes - 1), dtype=np.int64)
    right = np.zeros_like(left)
    valid = np.zeros(left.shape, dtype=bool)
    for mask in range(count):
        cuts = [0] + [i + 1 for i in range(inner) if mask >> i & 1] + [n_nodes - 1]
        k = len(cuts) - 1
        left[mask, :k] = cuts[:-1]
        right[mask, :k] = cuts[1:]
        valid[mask, :k] = True
    for arr in (left, right, valid):
        arr.setflags(write=False)
    return left, right, valid


def all_collections(n_nodes: int, max_count: int | None = None) -> Iterator[tuple[tuple[int, int], ...]]:
    """Every collection of nonoverlapping intervals with node endpoints."""

    def rec(start: int, acc: tuple[tuple[int, int], ...]):
        yield acc
        if max_count is not None and len(acc) >= max_count:
            return
        for a in range(start, n_nodes - 1):
            for b in range(a + 1, n_nodes):
                yield from rec(b, acc + ((a, b),))

    yield from rec(0, ())


def best_partition(W: np.ndarray, c: np.ndarray) -> tuple[float, int, tuple[tuple[int, int], ...]]:
    """Exact maximum over interval collections, for a stack of weight tables.

    Parameters
    ----------
    W : ndarray, shape (R, P, P)
        ``W[r, a, b]`` is the weight of interval ``(a, b)`` in problem ``r``.
    c : ndarray
        Rank weights, at least ``P - 1`` of them.

    Returns
    -------
    value, row, intervals
        Intervals are listed in rank order and exclude zero-weight pieces.
    """
    R, P, _ = W.shape
    if P < 2:
        return 0.0, 0, ()
    left, right, valid = partitions(P)
    G = np.where(valid, W[:, left, right], 0.0)
    Gs = -np.sort(-G, axis=2)
    vals = Gs @ c[: P - 1]
    flat = int(np.argmax(vals))
    r, m = divmod(flat, vals.shape[1])
    k = int(valid[m].sum())
    pieces = list(zip(left[m, :k].tolist(), right[m, :k].tolist()))
    w = W[r, left[m, :k], right[m, :k]]
    order = pairing_order(w)
    chosen = tuple(pieces[i] for i in order if w[i] > 0)
    # report the correctly rounded sum so equal multisets give equal values
    return sorted_pairing(w, c), r, chosen


def interval_items(n_nodes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Candidate intervals ``(a, b)`` in lexicographic order with cell masks."""
    a, b = np.triu_indices(n_nodes, k=1)
    cells = np.arange(n_nodes - 1)
    occupancy = (cells[None, :] >= a[:, None]) & (cells[None, :] < b[:, None])
    return a, b, occupancy


def greedy_select(weights: np.ndarray, occupancy: np.ndarray, c: np.ndarray) -> list[int]:
    """Insertion heuristic with one-for-one swap repair.

    Items must be supplied in tie-break order (lexicographic by key).  Each
    step applies the best of: inserting a compatible item, or replacing the
    single chosen item an incoming item conflicts with.  Stops when no move
    improves the sorted-pairing objective.

    Returns chosen item indices in rank order.
    """
    weights = np.asarray(weights, dtype=float)
    n_items, n_cells = occupancy.shape
    occ = occupancy.astype(np.float64)
    chosen: list[int] = []
    current = 0.0
    for _ in range(4 * n_items + 10):
        W = weights[chosen]
        order = np.argsort(-W, kind="stable")
        Ws = W[order]
        k = Ws.size
        cc = np.zeros(k + 2)
        cc[: min(k + 1, c.size)] = c[: min(k + 1, c.size)]
        if k + 1 > c.size:
            # no rank weight left for another item
            insert_gain = np.full(n_items, -np.inf)
        else:
            prefix = np.concatenate([[0.0], np.cumsum(Ws * cc[:k])])
            shifted = np.concatenate([np.cumsum((Ws * cc[1 : k + 1])[::-1])[::-1], [0.0]])
            pos = np.searchsorted(-Ws, -weights, side="right")
            insert_gain = prefix[pos] + weights * cc[pos] + shifted[pos] - current

        if chosen:
            owner = np.zeros((n_cells, len(chosen)))
            for j, item in enumerate(chosen):
                owner[:, j] = occupancy[item]
            conflicts = (occ @ owner) > 0
            n_conf = conflicts.sum(axis=1)
        else:
            conflicts = np.zeros((n_items, 0), dtype=bool)
            n_conf = np.zeros(n_items, dtype=np.int64)

        gain = np.where(n_conf == 0, insert_gain, -np.inf)
        gain[chosen] = -np.inf
        swap_with = np.full(n_items, -1)
        single = np.nonzero(n_conf == 1)[0]
        if single.size:
            partner = np.argmax(conflicts[single], axis=1)
            for j in np.unique(partner):
                rest = np.delete(W, j)
                rest_sorted = np.sort(rest)[::-1]
                m = rest_sorted.size
                cand = single[partner == j]
                prefix = np.concatenate([[0.0], np.cumsum(rest_sorted * cc[:m])])
                shifted = np.concatenate([np.cumsum((rest_sorted * cc[1 : m + 1])[::-1])[::-1], [0.0]])
                pos = np.searchsorted(-rest_sorted, -weights[cand], side="right")
                g = prefix[pos] + weights[cand] * cc[pos] + shifted[pos] - current
                better = g > gain[cand]
                gain[cand[better]] = g[better]
                swap_with[cand[better]] = j

        best = int(np.argmax(gain))
        if not gain[best] > _GAIN_TOL * max(1.0, abs(current)):
            break
        if swap_with[best] >= 0:
            chosen.pop(int(swap_with[best]))
        chosen.append(best)
        current = sorted_pairing(weights[chosen], c)
    order = pairing_order(weights[chosen])
    return [chosen[i] for i in order if weights[chosen[i]] > 0]


def branch_and_bound(
    weights: np.ndarray,
    masks: Sequence[int],
    c: np.ndarray,
    n_cells: int,
    incumbent: tuple[float, list[int]] = (0.0, []),
) -> tuple[float, list[int]]:
    """Exact maximum over pairwise disjoint items (bitmask cells).

    Items are explored in decreasing weight order, so the ``k``-th chosen item
    takes rank ``k``.  A node is pruned when its value plus the best pairing of
    the remaining compatible weights (limited to the number of free cells)
    cannot beat the incumbent.
    """
    weights = np.asarray(weights, dtype=float)
    keep = np.nonzero(weights > 0)[0]
    order = keep[np.argsort(-weights[keep], kind="stable")]
    w = weights[order].tolist()
    mk = [int(masks[i]) for i in order]
    cl = c.tolist()
    best_val, best_set = incumbent[0], list(incumbent[1])
    n = len(w)
    stack_choice: list[int] = []

    def dfs(start: int, used: int, k: int, value: float) -> None:
        nonlocal best_val, best_set
        if value > best_val * (1 + 1e-15) + 1e-300:
            best_val = value
            best_set = [int(order[i]) for i in stack_choice]
        if k >= len(cl):
            return
        free = n_cells - bin(used).count("1")
        room = min(free, len(cl) - k)
        compat = [i for i in range(start, n) if not mk[i] & used]
        if not compat:
            return
        bound = value
        for j, i in enumerate(compat[:room]):
            bound += w[i] * cl[k + j]
        if bound <= best_val * (1 + 1e-15):
            return
        for i in compat:
            stack_choice.append(i)
            dfs(i + 1, used | mk[i], k + 1, value + w[i] * cl[k])
            stack_choice.pop()

    dfs(0, 0, 0, 0.0)
    return best_val, best_set


def dp_additive(W: np.ndarray) -> tuple[float, tuple[tuple[int, int], ...]]:
    """Max of ``sum W[a, b]`` over interval collections (``W >= 0``), O(P^2)."""
    P = W.shape[0]
    best = np.zeros(P)
    arg = np.full(P, -1)
    for b in range(1, P):
        cand = best[:b] + W[:b, b]
        a = int(np.argmax(cand))
        if cand[a] > best[b - 1]:
            best[b], arg[b] = cand[a], a
        else:
            best[b], arg[b] = best[b - 1], -1
    out = []
    b = P - 1
    while b > 0:
        if arg[b] < 0:
            b -= 1
        else:
            out.append((int(arg[b]), b))
            b = int(arg[b])
    return float(best[-1]), tuple(reversed(out))


def dp_top_n(W: np.ndarray, n_max: int) -> np.ndarray:
    """``out[n-1]`` = max sum of at most ``n`` nonoverlapping interval weights."""
    P = W.shape[0]
    prev = np.zeros(P)
    out = np.zeros(n_max)
    for n in range(1, n_max + 1):
        cur = np.zeros(P)
        for b in range(1, P):
            cur[b] = max(cur[b - 1], float(np.max(prev[:b] + W[:b, b])))
        out[n - 1] = cur[-1]
        prev = cur
    return out
