"""Bandwidth/profile diagnostics and fill-oriented orderings.

Three permutations: reverse Cuthill-McKee on the symmetrized structure,
weighted maximum bipartite matching for a zero-free diagonal, and an exact
greedy column minimum-degree ordering.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import sparse
from .sparse import Permutation

__all__ = ["BandProfile", "band_profile", "rcm", "weighted_mbm",
           "col_min_degree", "StructurallySingularError"]


class StructurallySingularError(ValueError):
    """No perfect matching exists: some square submatrix of zeros blocks a
    zero-free diagonal."""


@dataclass(frozen=True)
class BandProfile:
    """Bandwidth and profile metrics of a sparse matrix."""

    ub: int
    lb: int
    bandwidth: int
    up: int
    lp: int
    profile: int


def band_profile(a):
    """Upper/lower bandwidths and profiles.

    ub is the largest column excess (j - i) over stored entries, lb the
    largest row excess; rows or columns whose entries all sit on the other
    side of the diagonal contribute 0 to the sums.
    """
    if a.nnz == 0:
        raise ValueError("band_profile of an empty matrix")
    rows, cols, _ = a.to_coo()
    per_row = np.zeros(a.nrows, dtype=np.int64)
    np.maximum.at(per_row, rows, cols - rows)
    per_col = np.zeros(a.ncols, dtype=np.int64)
    np.maximum.at(per_col, cols, rows - cols)
    ub = int(per_row.max(initial=0))
    lb = int(per_col.max(initial=0))
    up = int(per_row.sum())
    lp = int(per_col.sum())
    return BandProfile(ub=ub, lb=lb, bandwidth=ub + lb + 1, up=up, lp=lp,
                       profile=up + lp)


def _symmetric_adjacency(a):
    """Adjacency lists of the structure of a + a^T, self-edges removed."""
    n = a.nrows
    r, c, _ = a.to_coo()
    rows = np.concatenate([r, c])
    cols = np.concatenate([c, r])
    keep = rows != cols
    rows, cols = rows[keep], cols[keep]
    if rows.size:
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        first = np.ones(len(rows), dtype=bool)
        first[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        rows, cols = rows[first], cols[first]
    indptr = np.zeros(n + 1, dtype=np.int64)
    if rows.size:
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, cols


def rcm(a):
    """Reverse Cuthill-McKee ordering of the symmetrized structure.

    Deterministic variant: each component starts from the unvisited node of
    globally minimum degree (lowest index on ties); level-set neighbors are
    visited lowest degree first, ties by ascending index; the completed
    Cuthill-McKee order is reversed. Apply symmetrically to rows and columns.
    """
    if a.nrows != a.ncols:
        raise ValueError("rcm expects a square matrix")
    n = a.nrows
    indptr, indices = _symmetric_adjacency(a)
    deg = np.diff(indptr)
    adj = []
    for i in range(n):
        nb = indices[indptr[i]:indptr[i + 1]]
        adj.append(nb[np.lexsort((nb, deg[nb]))])
    visited = np.zeros(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    filled = 0
    cand = np.lexsort((np.arange(n), deg))
    ci = 0
    while filled < n:
        while visited[cand[ci]]:
            ci += 1
        start = cand[ci]
        visited[start] = True
        q = deque([start])
        while q:
            v = q.popleft()
            order[filled] = v
            filled += 1
            for u in adj[v]:
                if not visited[u]:
                    visited[u] = True
                    q.append(u)
    return Permutation.from_order(order[::-1])


def weighted_mbm(a):
    """Row permutation giving a zero-free structural diagonal, found by a
    weight-guided column BFS completed with augmenting paths.

    The BFS starts at the column holding the globally largest |value| and
    greedily matches each visited column to its largest-|value| free row;
    columns left unmatched are completed by augmenting paths (rows tried in
    descending |value|). Raises StructurallySingularError when no perfect
    matching exists.
    """
    if a.nrows != a.ncols:
        raise ValueError("weighted_mbm expects a square matrix")
    n = a.nrows
    at = sparse.transpose(a)

    col_rows = []      # per column: row indices, descending |value|
    col_best = np.zeros(n, dtype=np.float64)
    for j in range(n):
        p0, p1 = at.row_ptr[j], at.row_ptr[j + 1]
        rows = at.col_idx[p0:p1]
        mags = np.abs(at.values[p0:p1])
        order = np.lexsort((rows, -mags))
        col_rows.append(rows[order])
        col_best[j] = mags.max(initial=0.0)

    row_cols = []      # per row: column indices, descending |value|
    for i in range(n):
        p0, p1 = a.row_ptr[i], a.row_ptr[i + 1]
        cols = a.col_idx[p0:p1]
        mags = np.abs(a.values[p0:p1])
        row_cols.append(cols[np.lexsort((cols, -mags))])

    match_row = np.full(n, -1, dtype=np.int64)  # row -> column
    match_col = np.full(n, -1, dtype=np.int64)  # column -> row
    visited = np.zeros(n, dtype=bool)
    starts = np.lexsort((np.arange(n), -col_best))
    si = 0
    q = deque()
    done = 0
    while done < n:
        while si < n and visited[starts[si]]:
            si += 1
        if si == n:
            break
        visited[starts[si]] = True
        q.append(starts[si])
        done += 1
        while q:
            j = q.popleft()
            for r in col_rows[j]:
                if match_col[j] < 0 and match_row[r] < 0:
                    match_row[r] = j
                    match_col[j] = r
                for c2 in row_cols[r]:
                    if not visited[c2]:
                        visited[c2] = True
                        q.append(c2)
                        done += 1

    # Complete the greedy matching: BFS augmenting paths over alternating
    # edges, rows tried in descending |value| per column.
    for j0 in range(n):
        if match_col[j0] >= 0:
            continue
        reached_from = np.full(n, -1, dtype=np.int64)  # row -> column
        in_tree = np.zeros(n, dtype=bool)
        in_tree[j0] = True
        q = deque([j0])
        augmented = False
        while q and not augmented:
            j = q.popleft()
            for r in col_rows[j]:
                if reached_from[r] >= 0:
                    continue
                reached_from[r] = j
                jm = int(match_row[r])
                if jm < 0:
                    # free row: flip the alternating path back to j0
                    rr = int(r)
                    while True:
                        jj = int(reached_from[rr])
                        prev = int(match_col[jj])
                        match_row[rr] = jj
                        match_col[jj] = rr
                        if prev < 0:
                            break
                        rr = prev
                    augmented = True
                    break
                if not in_tree[jm]:
                    in_tree[jm] = True
                    q.append(jm)
        if not augmented:
            raise StructurallySingularError(
                "matrix is structurally singular: no zero-free diagonal")

    forward = match_row  # row r moves to position match_row[r]
    return Permutation(forward)


def col_min_degree(a):
    """Exact greedy minimum-degree ordering on the column-intersection graph
    (columns adjacent iff they share a row), ties to the lowest index.

    The graph is tracked in quotient form: rows start as the elements; the
    elements touching an eliminated column merge into one. Degrees stay exact
    throughout, so the result is the true greedy elimination order.
    """
    if a.nrows != a.ncols:
        raise ValueError("col_min_degree expects a square matrix")
    n = a.nrows
    at = sparse.transpose(a)
    row_cols = [set(a.col_idx[a.row_ptr[i]:a.row_ptr[i + 1]].tolist())
                for i in range(n)]
    elems = [set(at.col_idx[at.row_ptr[j]:at.row_ptr[j + 1]].tolist())
             for j in range(n)]
    cols_of = {r: row_cols[r] for r in range(n) if row_cols[r]}

    def degree(j):
        u = set()
        for e in elems[j]:
            u |= cols_of[e]
        u.discard(j)
        return len(u)

    cur = np.empty(n, dtype=np.int64)
    heap = []
    for j in range(n):
        cur[j] = degree(j)
        heap.append((int(cur[j]), j))
    heapq.heapify(heap)

    eliminated = np.zeros(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    next_elem = n
    for k in range(n):
        while True:
            d, j = heapq.heappop(heap)
            if not eliminated[j] and d == cur[j]:
                break
        order[k] = j
        eliminated[j] = True
        neighbors = set()
        for e in elems[j]:
            neighbors |= cols_of[e]
        neighbors.discard(j)
        for e in elems[j]:
            for c in cols_of[e]:
                if c != j:
                    elems[c].discard(e)
            del cols_of[e]
        elems[j] = set()
        if neighbors:
            eid = next_elem
            next_elem += 1
            cols_of[eid] = neighbors
            for c in neighbors:
                elems[c].add(eid)
            for c in neighbors:
                cur[c] = degree(c)
                heapq.heappush(heap, (int(cur[c]), c))
    return Permutation.from_order(order)
