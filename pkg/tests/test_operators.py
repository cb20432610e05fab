"""Operator-layer tests: ladder and spin algebra, tensor embedding."""

import numpy as np
import pytest

from rhosolve.operators import (QuantumOperator, destroy, embed,
                                identity_operator, spin_ops)


def test_destroy_matrix_elements():
    a = destroy(4)
    dense = a.to_dense()
    # a|n> = sqrt(n)|n-1>, so entry (n-1, n) = sqrt(n)
    for n in range(1, 4):
        assert dense[n - 1, n] == np.sqrt(n)
    assert np.count_nonzero(dense) == 3
    assert a.dims == (4,)


def test_number_operator_and_commutator():
    a = destroy(6)
    ad = a.adjoint()
    num = (ad @ a).to_dense()
    assert np.max(np.abs(num - np.diag(np.arange(6.0)))) <= 1e-13
    # [a, a+] = 1 on the subspace below the truncation edge
    comm = (a @ ad - ad @ a).to_dense()
    assert np.max(np.abs(comm[:5, :5] - np.eye(5))) <= 1e-13


def test_spin_ops_conventions():
    ops = spin_ops()
    sz = ops["sigma_z"].to_dense()
    sm = ops["sigma_minus"].to_dense()
    sp = ops["sigma_plus"].to_dense()
    sx = ops["sigma_x"].to_dense()
    sy = ops["sigma_y"].to_dense()
    # index 0 is the excited state
    assert np.array_equal(sz, np.diag([1.0, -1.0]))
    assert sm[1, 0] == 1.0 and np.count_nonzero(sm) == 1
    assert np.array_equal(sp, sm.conj().T)
    assert np.array_equal(sx, sm + sp)
    assert np.max(np.abs(sy - 1j * (sm - sp))) == 0.0
    # Pauli algebra
    assert np.max(np.abs(sx @ sx - np.eye(2))) <= 1e-15
    assert np.max(np.abs(sx @ sy - sy @ sx - 2j * sz)) <= 1e-15


def test_identity_operator():
    ident = identity_operator((2, 3))
    assert ident.dims == (2, 3)
    assert np.array_equal(ident.to_dense(), np.eye(6))


def test_arithmetic_and_scalars():
    a = destroy(3)
    ad = a.adjoint()
    x = a + ad
    assert np.array_equal(x.to_dense(), a.to_dense() + ad.to_dense())
    assert np.array_equal((x - a).to_dense(), ad.to_dense())
    y = 2.5j * x
    assert np.array_equal(y.to_dense(), 2.5j * x.to_dense())
    assert np.array_equal((-x).to_dense(), -x.to_dense())
    assert (0.0 * x).matrix.nnz == 0
    with pytest.raises(ValueError):
        a + identity_operator((3, 2))  # dims differ even though dim matches


def test_embed_positions_and_kron_order():
    a = destroy(3)
    left = embed(a, (3, 2), 0).to_dense()
    right = embed(a, (2, 3), 1).to_dense()
    assert np.array_equal(left, np.kron(a.to_dense(), np.eye(2)))
    assert np.array_equal(right, np.kron(np.eye(2), a.to_dense()))
    assert embed(a, (3, 2), 0).dims == (3, 2)


def test_embed_three_factor_chain():
    sz = spin_ops()["sigma_z"]
    dims = (2, 2, 2)
    mid = embed(sz, dims, 1).to_dense()
    ref = np.kron(np.eye(2), np.kron(sz.to_dense(), np.eye(2)))
    assert np.array_equal(mid, ref)
    # embedded single-site operators on different sites commute
    first = embed(sz, dims, 0).to_dense()
    last = embed(sz, dims, 2).to_dense()
    assert np.max(np.abs(first @ last - last @ first)) == 0.0


def test_embed_validates_dims():
    a = destroy(3)
    with pytest.raises(ValueError):
        embed(a, (2, 2), 0)  # site dimension mismatch
    with pytest.raises(IndexError):
        embed(a, (3, 2), 2)


def test_operator_validates_shape_against_dims():
    from rhosolve.sparse import SparseComplexMatrix
    rect = SparseComplexMatrix.from_dense(np.ones((2, 3)))
    with pytest.raises(ValueError):
        QuantumOperator(rect, (2,))
    square = SparseComplexMatrix.from_dense(np.eye(4))
    with pytest.raises(ValueError):
        QuantumOperator(square, (2,))  # product of dims is 2, side is 4
    with pytest.raises(ValueError):
        QuantumOperator(square, (4, 0))
