"""Sparse-core tests: CSR construction, algebra against a scipy oracle,
permutations, vectorization, and Matrix Market round trips."""

import numpy as np
import pytest
import scipy.sparse as sp

from rhosolve import sparse
from rhosolve.sparse import Permutation, SparseComplexMatrix


def random_csr(rng, nrows, ncols, density=0.15):
    """Random complex CSR test matrix with a few guaranteed duplicates
    upstream so from_coo's merge path is exercised."""
    k = max(1, int(density * nrows * ncols))
    rows = rng.integers(0, nrows, size=k)
    cols = rng.integers(0, ncols, size=k)
    vals = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return SparseComplexMatrix.from_coo(nrows, ncols, rows, cols, vals)


def to_scipy(a):
    rows, cols, vals = a.to_coo()
    return sp.csr_matrix((vals, (rows, cols)), shape=a.shape)


def max_abs_diff(a, dense):
    return float(np.max(np.abs(a.to_dense() - dense))) if dense.size else 0.0


def test_from_coo_merges_duplicates_and_prunes_zeros():
    a = SparseComplexMatrix.from_coo(
        3, 3,
        [0, 0, 1, 2, 2],
        [1, 1, 2, 0, 0],
        [1 + 1j, 2.0, 3.0, 5.0, -5.0])
    assert a.nnz == 2
    dense = a.to_dense()
    assert dense[0, 1] == 3 + 1j
    assert dense[1, 2] == 3.0
    assert dense[2, 0] == 0.0


def test_from_coo_prune_false_keeps_explicit_zeros():
    a = SparseComplexMatrix.from_coo(2, 2, [0, 1], [0, 1], [0.0, 0.0],
                                     prune=False)
    assert a.nnz == 2
    assert np.all(a.values == 0)
    assert a.prune().nnz == 0


def test_dense_round_trip():
    rng = np.random.default_rng(7)
    dense = rng.standard_normal((9, 5)) + 1j * rng.standard_normal((9, 5))
    dense[np.abs(dense.real) < 0.8] = 0.0
    a = SparseComplexMatrix.from_dense(dense)
    assert np.array_equal(a.to_dense(), dense)
    assert a.nnz == np.count_nonzero(dense)


def test_csr_invariants_rejected():
    with pytest.raises(ValueError):
        SparseComplexMatrix(2, 2, [0, 1], [0], [1.0])  # row_ptr too short
    with pytest.raises(ValueError):
        SparseComplexMatrix(2, 2, [0, 2, 1], [0, 1], [1.0, 1.0])
    with pytest.raises(ValueError):
        SparseComplexMatrix(1, 3, [0, 2], [2, 1], [1.0, 1.0])  # not increasing
    with pytest.raises(ValueError):
        SparseComplexMatrix(1, 2, [0, 1], [5], [1.0])  # column out of range


def test_identity():
    a = sparse.identity(4)
    assert np.array_equal(a.to_dense(), np.eye(4))


def test_diagonal_and_stored_count():
    a = SparseComplexMatrix.from_coo(3, 3, [0, 1, 2], [0, 2, 2],
                                     [2.0, 7.0, 0.0], prune=False)
    d = a.diagonal()
    assert np.array_equal(d, [2.0, 0.0, 0.0])
    # the explicit zero at (2, 2) still counts as stored
    assert a.diagonal_stored_count() == 2


def test_add_against_scipy():
    rng = np.random.default_rng(11)
    a = random_csr(rng, 24, 24)
    b = random_csr(rng, 24, 24)
    ref = (2.5 * to_scipy(a) + (-1j) * to_scipy(b)).toarray()
    got = sparse.add(a, b, alpha=2.5, beta=-1j)
    assert max_abs_diff(got, ref) <= 1e-13


def test_add_shape_mismatch():
    rng = np.random.default_rng(12)
    with pytest.raises(ValueError):
        sparse.add(random_csr(rng, 3, 4), random_csr(rng, 4, 3))


def test_add_prunes_cancellation():
    a = SparseComplexMatrix.from_coo(2, 2, [0], [0], [1.5])
    b = SparseComplexMatrix.from_coo(2, 2, [0], [0], [1.5])
    assert sparse.add(a, b, alpha=1.0, beta=-1.0).nnz == 0


def test_transpose_conjugate_adjoint():
    rng = np.random.default_rng(13)
    a = random_csr(rng, 17, 9)
    assert max_abs_diff(sparse.transpose(a), to_scipy(a).toarray().T) == 0.0
    assert max_abs_diff(sparse.conjugate(a),
                        np.conj(to_scipy(a).toarray())) == 0.0
    adj = sparse.adjoint(a)
    assert adj.shape == (9, 17)
    assert max_abs_diff(adj, to_scipy(a).toarray().conj().T) == 0.0
    # transpose preserves explicit zeros
    z = SparseComplexMatrix.from_coo(2, 2, [0, 1], [1, 0], [0.0, 2.0],
                                     prune=False)
    assert sparse.transpose(z).nnz == 2


def test_matmul_against_scipy():
    rng = np.random.default_rng(17)
    a = random_csr(rng, 12, 20)
    b = random_csr(rng, 20, 8)
    ref = (to_scipy(a) @ to_scipy(b)).toarray()
    assert max_abs_diff(sparse.matmul(a, b), ref) <= 1e-13
    with pytest.raises(ValueError):
        sparse.matmul(a, a)


def test_matvec_against_scipy():
    rng = np.random.default_rng(19)
    a = random_csr(rng, 40, 40, density=0.1)
    x = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    ref = to_scipy(a) @ x
    got = sparse.matvec(a, x)
    assert np.max(np.abs(got - ref)) <= 1e-13
    with pytest.raises(ValueError):
        sparse.matvec(a, x[:-1])


def test_matvec_empty_rows():
    a = SparseComplexMatrix.from_coo(3, 3, [1], [2], [4.0])
    y = sparse.matvec(a, np.array([1.0, 2.0, 3.0], dtype=complex))
    assert np.array_equal(y, [0.0, 12.0, 0.0])


def test_kron_against_scipy_and_nnz_product():
    rng = np.random.default_rng(23)
    a = random_csr(rng, 6, 5)
    b = random_csr(rng, 4, 7)
    got = sparse.kron(a, b)
    ref = sp.kron(to_scipy(a), to_scipy(b)).toarray()
    assert max_abs_diff(got, ref) <= 1e-13
    # products of nonzero values cannot vanish, so storage is exactly
    # the product of the operand storage counts
    assert got.nnz == a.nnz * b.nnz


def test_kron_index_layout():
    # entry (i*p+k, j*q+l) = a[i,j]*b[k,l], checked on one placed entry
    a = SparseComplexMatrix.from_coo(2, 3, [1], [2], [2.0])
    b = SparseComplexMatrix.from_coo(3, 2, [2], [0], [5.0])
    k = sparse.kron(a, b)
    assert k.shape == (6, 6)
    assert k.to_dense()[1 * 3 + 2, 2 * 2 + 0] == 10.0


def test_permutation_basics():
    p = Permutation([2, 0, 1])
    assert np.array_equal(p.inverse, [1, 2, 0])
    assert np.array_equal(p.forward[p.inverse], np.arange(3))
    assert Permutation.identity(5).is_identity()
    q = Permutation.from_order([2, 0, 1])  # original 2 goes to position 0
    assert np.array_equal(q.forward, [1, 2, 0])
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])
    with pytest.raises(ValueError):
        Permutation([0, 1, 2], [1, 0, 2])


def test_permutation_save_load(tmp_path):
    p = Permutation([3, 1, 0, 2])
    path = tmp_path / "perm.txt"
    p.save(path)
    q = Permutation.load(path)
    assert np.array_equal(q.forward, p.forward)
    assert np.array_equal(q.inverse, p.inverse)


def test_permute_definition_and_round_trip():
    rng = np.random.default_rng(29)
    a = random_csr(rng, 10, 10)
    rp = Permutation(rng.permutation(10))
    cp = Permutation(rng.permutation(10))
    b = sparse.permute(a, rp, cp)
    da, db = a.to_dense(), b.to_dense()
    for i in range(10):
        for j in range(10):
            assert db[rp.forward[i], cp.forward[j]] == da[i, j]
    assert b.nnz == a.nnz
    back = sparse.permute(b, Permutation(rp.inverse, rp.forward),
                          Permutation(cp.inverse, cp.forward))
    assert np.array_equal(back.row_ptr, a.row_ptr)
    assert np.array_equal(back.col_idx, a.col_idx)
    assert np.array_equal(back.values, a.values)
    with pytest.raises(ValueError):
        sparse.permute(a, Permutation.identity(9), cp)


def test_vec_unvec_column_stacking():
    rho = SparseComplexMatrix.from_dense(
        np.array([[1.0, 2.0], [3.0, 4.0]]))
    v = sparse.vec(rho)
    # column-stacked: index = col*dim + row
    assert np.array_equal(v, [1.0, 3.0, 2.0, 4.0])
    assert np.array_equal(sparse.unvec(v), rho.to_dense())
    assert np.array_equal(sparse.unvec(v, dim=2), rho.to_dense())
    with pytest.raises(ValueError):
        sparse.vec(SparseComplexMatrix.from_coo(2, 3, [0], [0], [1.0]))
    with pytest.raises(ValueError):
        sparse.unvec(np.ones(3))


def test_vec_unvec_random_round_trip():
    rng = np.random.default_rng(31)
    dense = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
    v = sparse.vec(SparseComplexMatrix.from_dense(dense, prune=False))
    assert np.array_equal(sparse.unvec(v, 7), dense)


def test_matrix_market_round_trip(tmp_path):
    rng = np.random.default_rng(37)
    a = random_csr(rng, 15, 11)
    path = tmp_path / "a.mtx"
    sparse.write_matrix_market(a, path, comment="unit test\nsecond line")
    text = path.read_text().splitlines()
    assert text[0] == "%%MatrixMarket matrix coordinate complex general"
    assert text[1] == "% unit test"
    assert text[2] == "% second line"
    assert text[3] == f"15 11 {a.nnz}"
    b = sparse.read_matrix_market(path)
    assert b.shape == a.shape
    # %.17g round-trips float64 exactly
    assert np.array_equal(b.row_ptr, a.row_ptr)
    assert np.array_equal(b.col_idx, a.col_idx)
    assert np.array_equal(b.values, a.values)


def test_matrix_market_reads_real_and_rejects_bad_headers(tmp_path):
    path = tmp_path / "r.mtx"
    path.write_text("%%MatrixMarket matrix coordinate real general\n"
                    "% comment\n"
                    "2 2 2\n"
                    "1 1 3.5\n"
                    "2 1 -1\n")
    a = sparse.read_matrix_market(path)
    assert np.array_equal(a.to_dense(), [[3.5, 0.0], [-1.0, 0.0]])

    bad = tmp_path / "bad.mtx"
    bad.write_text("%%MatrixMarket matrix array real general\n1 1\n2\n")
    with pytest.raises(ValueError):
        sparse.read_matrix_market(bad)
    sym = tmp_path / "sym.mtx"
    sym.write_text("%%MatrixMarket matrix coordinate real symmetric\n"
                   "1 1 1\n1 1 2\n")
    with pytest.raises(ValueError):
        sparse.read_matrix_market(sym)


def test_matrix_market_preserves_explicit_zeros(tmp_path):
    a = SparseComplexMatrix.from_coo(2, 2, [0, 1], [0, 1], [1.0, 0.0],
                                     prune=False)
    path = tmp_path / "z.mtx"
    sparse.write_matrix_market(a, path)
    assert sparse.read_matrix_market(path).nnz == 2
