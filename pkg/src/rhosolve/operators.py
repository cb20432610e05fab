"""Elementary quantum operators and their tensor-product embeddings."""

from __future__ import annotations

import numpy as np

from . import sparse
from .sparse import SparseComplexMatrix

__all__ = ["QuantumOperator", "destroy", "spin_ops", "embed",
           "identity_operator"]


class QuantumOperator:
    """Sparse square operator tagged with its subsystem dimension list.

    Supports the small algebra the model builders need: +, -, scalar *,
    @ for operator products, and adjoint().
    """

    __slots__ = ("matrix", "dims")

    def __init__(self, matrix, dims):
        dims = tuple(int(d) for d in dims)
        side = 1
        for d in dims:
            if d < 1:
                raise ValueError("subsystem dimensions must be >= 1")
            side *= d
        if matrix.nrows != matrix.ncols:
            raise ValueError("operator matrix must be square")
        if matrix.nrows != side:
            raise ValueError(
                f"matrix side {matrix.nrows} != product of dims {dims}")
        self.matrix = matrix
        self.dims = dims

    @property
    def dim(self):
        return self.matrix.nrows

    def adjoint(self):
        return QuantumOperator(sparse.adjoint(self.matrix), self.dims)

    def to_dense(self):
        return self.matrix.to_dense()

    def _require_same_dims(self, other):
        if not isinstance(other, QuantumOperator):
            raise TypeError(f"expected QuantumOperator, got {type(other)!r}")
        if self.dims != other.dims:
            raise ValueError(f"dims mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other):
        self._require_same_dims(other)
        return QuantumOperator(sparse.add(self.matrix, other.matrix),
                               self.dims)

    def __sub__(self, other):
        self._require_same_dims(other)
        return QuantumOperator(
            sparse.add(self.matrix, other.matrix, 1.0, -1.0), self.dims)

    def __matmul__(self, other):
        self._require_same_dims(other)
        return QuantumOperator(sparse.matmul(self.matrix, other.matrix),
                               self.dims)

    def __mul__(self, alpha):
        if isinstance(alpha, QuantumOperator):
            raise TypeError("use @ for operator products")
        z = sparse.SparseComplexMatrix(
            self.matrix.nrows, self.matrix.ncols, self.matrix.row_ptr,
            self.matrix.col_idx, alpha * self.matrix.values, validate=False)
        return QuantumOperator(z.prune() if alpha == 0 else z, self.dims)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        return f"QuantumOperator(dims={list(self.dims)}, nnz={self.matrix.nnz})"


def identity_operator(dims):
    """Identity on the tensor-product space described by dims."""
    dims = tuple(int(d) for d in dims)
    side = int(np.prod(dims)) if dims else 1
    return QuantumOperator(sparse.identity(side), dims)


def destroy(n):
    """Truncated boson annihilation operator: a[k-1, k] = sqrt(k)."""
    if n < 1:
        raise ValueError("mode dimension must be >= 1")
    k = np.arange(1, n, dtype=np.int64)
    m = SparseComplexMatrix.from_coo(n, n, k - 1, k, np.sqrt(k))
    return QuantumOperator(m, [n])


def spin_ops():
    """Spin-1/2 operators in the z basis.

    Basis index 0 is the excited state (sigma_z eigenvalue +1), index 1 the
    ground state, so sigma_minus has its single nonzero at (1, 0).
    """
    sm = QuantumOperator(
        SparseComplexMatrix.from_coo(2, 2, [1], [0], [1.0]), [2])
    sp = sm.adjoint()
    sx = sm + sp
    sy = 1j * sm - 1j * sp
    sz = QuantumOperator(
        SparseComplexMatrix.from_coo(2, 2, [0, 1], [0, 1], [1.0, -1.0]), [2])
    return {"sigma_x": sx, "sigma_y": sy, "sigma_z": sz,
            "sigma_minus": sm, "sigma_plus": sp}


def embed(op, dims, position):
    """Kronecker chain I (x) ... (x) op (x) ... (x) I with op at `position`.

    Position 0 is the leftmost (slowest-index) factor.
    """
    dims = tuple(int(d) for d in dims)
    if not 0 <= position < len(dims):
        raise IndexError(f"position {position} out of range for {dims}")
    if op.dims != (dims[position],):
        raise ValueError(
            f"operator dims {op.dims} do not match dims[{position}]"
            f" = {dims[position]}")
    left = int(np.prod(dims[:position], dtype=np.int64)) if position else 1
    right = (int(np.prod(dims[position + 1:], dtype=np.int64))
             if position + 1 < len(dims) else 1)
    m = op.matrix
    if left > 1:
        m = sparse.kron(sparse.identity(left), m)
    if right > 1:
        m = sparse.kron(m, sparse.identity(right))
    return QuantumOperator(m, dims)
