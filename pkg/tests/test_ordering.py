"""Ordering tests.

The RCM and column-min-degree implementations are checked against small
independent reference implementations written with different data structures
(dense boolean adjacency, explicit fill edges), and the matching against
scipy's Hopcroft-Karp maximum bipartite matching.
"""

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.csgraph import maximum_bipartite_matching

from rhosolve import sparse
from rhosolve.ordering import (BandProfile, StructurallySingularError,
                               band_profile, col_min_degree, rcm,
                               weighted_mbm)
from rhosolve.sparse import Permutation, SparseComplexMatrix


def random_structure(rng, n, density=0.12, ensure_diag=False):
    k = max(1, int(density * n * n))
    rows = rng.integers(0, n, size=k)
    cols = rng.integers(0, n, size=k)
    vals = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    if ensure_diag:
        rows = np.concatenate([rows, np.arange(n)])
        cols = np.concatenate([cols, np.arange(n)])
        vals = np.concatenate([vals, np.ones(n)])
    return SparseComplexMatrix.from_coo(n, n, rows, cols, vals)


# ---------------------------------------------------------------- band_profile

def test_band_profile_hand_example():
    #     0 1 2 3
    #  0 [x . x .]   row excesses (j - i, clipped): 2, 0, 1, 0
    #  1 [. x . .]   col excesses (i - j, clipped): 2, 0, 0, 0
    #  2 [x . . x]
    #  3 [. . . .]
    a = SparseComplexMatrix.from_coo(4, 4, [0, 0, 1, 2, 2],
                                     [0, 2, 1, 0, 3], np.ones(5))
    bp = band_profile(a)
    assert bp == BandProfile(ub=2, lb=2, bandwidth=5, up=3, lp=2, profile=5)


def test_band_profile_diagonal_and_empty():
    assert band_profile(sparse.identity(5)) == BandProfile(0, 0, 1, 0, 0, 0)
    with pytest.raises(ValueError):
        band_profile(SparseComplexMatrix.from_coo(3, 3, [], [], []))


def test_band_profile_random_against_dense():
    rng = np.random.default_rng(211)
    for _ in range(10):
        a = random_structure(rng, 20)
        rows, cols, _ = a.to_coo()
        bp = band_profile(a)
        assert bp.ub == max(0, max(int(c - r) for r, c in zip(rows, cols)))
        assert bp.lb == max(0, max(int(r - c) for r, c in zip(rows, cols)))
        up = sum(max(0, max((int(c - r) for r, c in zip(rows, cols)
                             if r == i), default=0)) for i in range(20))
        lp = sum(max(0, max((int(r - c) for r, c in zip(rows, cols)
                             if c == j), default=0)) for j in range(20))
        assert bp.up == up and bp.lp == lp
        assert bp.bandwidth == bp.ub + bp.lb + 1
        assert bp.profile == up + lp


# ------------------------------------------------------------------------ rcm

def rcm_reference(a):
    """Same pinned rules, different machinery: dense boolean adjacency,
    sorted() with explicit keys, list-as-queue."""
    n = a.nrows
    dense = a.to_dense() != 0
    sym = dense | dense.T
    np.fill_diagonal(sym, False)
    deg = sym.sum(axis=1)
    unvisited = set(range(n))
    order = []
    while unvisited:
        start = min(unvisited, key=lambda i: (deg[i], i))
        unvisited.remove(start)
        queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            nbrs = sorted((int(u) for u in np.flatnonzero(sym[v])
                           if u in unvisited), key=lambda u: (deg[u], u))
            for u in nbrs:
                unvisited.remove(u)
                queue.append(u)
    order.reverse()
    return np.array(order, dtype=np.int64)


def test_rcm_matches_reference_on_random_structures():
    rng = np.random.default_rng(223)
    for trial in range(25):
        n = int(rng.integers(2, 40))
        a = random_structure(rng, n, density=float(rng.uniform(0.05, 0.4)))
        p = rcm(a)
        assert np.array_equal(p.inverse, rcm_reference(a))


def test_rcm_recovers_path_graph():
    # a path graph has bandwidth 1 under the right labeling; RCM must find it
    # from any scrambling
    rng = np.random.default_rng(227)
    n = 30
    rows = np.arange(n - 1)
    cols = np.arange(1, n)
    path = SparseComplexMatrix.from_coo(
        n, n,
        np.concatenate([rows, cols, np.arange(n)]),
        np.concatenate([cols, rows, np.arange(n)]),
        np.ones(3 * n - 2))
    scramble = Permutation(rng.permutation(n))
    scrambled = sparse.permute(path, scramble, scramble)
    p = rcm(scrambled)
    bp = band_profile(sparse.permute(scrambled, p, p))
    assert bp.bandwidth == 3  # ub = lb = 1


def test_rcm_reduces_grid_bandwidth():
    # 2-d grid labeled row-major has bandwidth ~side; RCM keeps it at the
    # level-set width, never worse
    side = 8
    n = side * side
    rows, cols = [], []
    for i in range(side):
        for j in range(side):
            u = i * side + j
            for v in (u + 1 if j + 1 < side else None,
                      u + side if i + 1 < side else None):
                if v is not None:
                    rows += [u, v]
                    cols += [v, u]
    rows += list(range(n))
    cols += list(range(n))
    grid = SparseComplexMatrix.from_coo(n, n, rows, cols,
                                        np.ones(len(rows)))
    p = rcm(grid)
    assert band_profile(sparse.permute(grid, p, p)).bandwidth <= \
        band_profile(grid).bandwidth


def test_rcm_deterministic_and_square_only():
    rng = np.random.default_rng(229)
    a = random_structure(rng, 25)
    assert np.array_equal(rcm(a).forward, rcm(a).forward)
    with pytest.raises(ValueError):
        rcm(SparseComplexMatrix.from_coo(2, 3, [0], [2], [1.0]))


def test_rcm_handles_isolated_nodes_and_components():
    # two disjoint edges plus an isolated node; isolated (degree 0) nodes are
    # component starts first by the global min-degree rule
    a = SparseComplexMatrix.from_coo(5, 5, [0, 1, 3, 4], [1, 0, 4, 3],
                                     np.ones(4))
    p = rcm(a)
    assert np.array_equal(p.inverse, rcm_reference(a))
    assert sorted(p.forward.tolist()) == list(range(5))


# --------------------------------------------------------------- weighted_mbm

def test_mbm_zero_free_diagonal_random():
    rng = np.random.default_rng(233)
    hits = 0
    for _ in range(30):
        n = int(rng.integers(2, 30))
        a = random_structure(rng, n, density=0.25)
        ref = maximum_bipartite_matching(
            sp.csr_matrix((np.ones(a.nnz), a.col_idx.copy(),
                           a.row_ptr.copy()), shape=a.shape),
            perm_type="row")
        if np.count_nonzero(ref >= 0) < n:
            with pytest.raises(StructurallySingularError):
                weighted_mbm(a)
            continue
        p = weighted_mbm(a)
        hits += 1
        permuted = sparse.permute(a, p, Permutation.identity(n))
        assert permuted.diagonal_stored_count() == n
    assert hits >= 5  # the scan must exercise both branches
    assert hits <= 29


def test_mbm_prefers_heavy_entries():
    # both perfect matchings exist; the weight-guided search takes the one
    # through the large values
    a = SparseComplexMatrix.from_dense(np.array([[1.0, 5.0],
                                                 [5.0, 1.0]]))
    p = weighted_mbm(a)
    d = np.abs(sparse.permute(a, p, Permutation.identity(2)).diagonal())
    assert np.all(d == 5.0)


def test_mbm_identity_on_dominant_diagonal():
    rng = np.random.default_rng(239)
    n = 12
    a = random_structure(rng, n, density=0.1, ensure_diag=True)
    dense = a.to_dense() + 100 * np.eye(n)
    p = weighted_mbm(SparseComplexMatrix.from_dense(dense))
    assert p.is_identity()


def test_mbm_structural_singularity():
    # zero row
    a = SparseComplexMatrix.from_coo(3, 3, [0, 0, 1], [0, 1, 2], np.ones(3))
    with pytest.raises(StructurallySingularError):
        weighted_mbm(a)
    # square but a 2x2 zero block forces deficiency (Hall violation:
    # columns {0, 1} only reach row 0)
    b = SparseComplexMatrix.from_coo(3, 3, [0, 0, 0, 1, 2], [0, 1, 2, 2, 2],
                                     np.ones(5))
    with pytest.raises(StructurallySingularError):
        weighted_mbm(b)
    with pytest.raises(ValueError):
        weighted_mbm(SparseComplexMatrix.from_coo(2, 3, [0], [0], [1.0]))


def test_mbm_needs_augmentation_case():
    # greedy BFS can match col 1 to row 0 first (largest value), which must
    # then be undone by an augmenting path for col 0 whose only row is 0
    a = SparseComplexMatrix.from_dense(np.array([[2.0, 9.0],
                                                 [0.0, 1.0]]))
    p = weighted_mbm(a)
    permuted = sparse.permute(a, p, Permutation.identity(2))
    assert permuted.diagonal_stored_count() == 2


# ------------------------------------------------------------- col_min_degree

def cmd_reference(a):
    """Greedy min-degree on the explicit column-intersection graph with
    clique fill, ties to the lowest column index."""
    n = a.nrows
    dense = a.to_dense() != 0
    adj = {j: set() for j in range(n)}
    for i in range(n):
        cols = [int(c) for c in np.flatnonzero(dense[i])]
        for x in cols:
            for y in cols:
                if x != y:
                    adj[x].add(y)
    order = []
    alive = set(range(n))
    while alive:
        j = min(alive, key=lambda c: (len(adj[c]), c))
        order.append(j)
        alive.remove(j)
        nbrs = adj.pop(j)
        for u in nbrs:
            adj[u].discard(j)
        for x in nbrs:
            for y in nbrs:
                if x != y:
                    adj[x].add(y)
    return np.array(order, dtype=np.int64)


def test_cmd_matches_reference_on_random_structures():
    rng = np.random.default_rng(241)
    for trial in range(20):
        n = int(rng.integers(2, 32))
        a = random_structure(rng, n, density=float(rng.uniform(0.05, 0.35)))
        p = col_min_degree(a)
        assert np.array_equal(p.inverse, cmd_reference(a))


def test_cmd_eliminates_arrowhead_center_last():
    # dense first column plus diagonal: every row couples column 0 with one
    # other column, so columns 1..n-1 have degree 1 and go first; column 0
    # (degree n-1) goes last
    n = 10
    rows = list(range(n)) + list(range(1, n))
    cols = [0] * n + list(range(1, n))
    a = SparseComplexMatrix.from_coo(n, n, rows, cols, np.ones(len(rows)))
    p = col_min_degree(a)
    # columns 1..8 first; then 0 and 9 tie at degree 1 and the lower index
    # wins, so 0 precedes the last leaf
    assert np.array_equal(p.inverse,
                          list(range(1, n - 1)) + [0, n - 1])


def test_cmd_identity_on_diagonal_matrix():
    p = col_min_degree(sparse.identity(6))
    assert p.is_identity()
    with pytest.raises(ValueError):
        col_min_degree(SparseComplexMatrix.from_coo(2, 3, [0], [0], [1.0]))


def test_cmd_deterministic():
    rng = np.random.default_rng(251)
    a = random_structure(rng, 28, density=0.15)
    assert np.array_equal(col_min_degree(a).forward,
                          col_min_degree(a).forward)
