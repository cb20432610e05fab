"""Compressed-row complex sparse matrices, permutations, and vectorization."""

from __future__ import annotations

import numpy as np

from . import kernels

__all__ = [
    "SparseComplexMatrix",
    "Permutation",
    "kron",
    "transpose",
    "conjugate",
    "adjoint",
    "add",
    "matmul",
    "matvec",
    "permute",
    "vec",
    "unvec",
    "identity",
    "read_matrix_market",
    "write_matrix_market",
]

_MM_HEADER = "%%MatrixMarket matrix coordinate complex general"


class SparseComplexMatrix:
    """Sparse complex matrix in compressed-row form.

    Stored entries are sorted by row, strictly increasing column within each
    row. Instances are immutable after construction; share them freely across
    threads but build them in one.
    """

    __slots__ = ("nrows", "ncols", "row_ptr", "col_idx", "values")

    def __init__(self, nrows, ncols, row_ptr, col_idx, values, validate=True):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.row_ptr = np.ascontiguousarray(row_ptr, dtype=np.int64)
        self.col_idx = np.ascontiguousarray(col_idx, dtype=np.int64)
        self.values = np.ascontiguousarray(values, dtype=np.complex128)
        if validate:
            self._check()

    def _check(self):
        if self.nrows < 0 or self.ncols < 0:
            raise ValueError("negative dimension")
        if len(self.row_ptr) != self.nrows + 1:
            raise ValueError("row_ptr length must be nrows + 1")
        if self.row_ptr[0] != 0 or self.row_ptr[-1] != len(self.values):
            raise ValueError("row_ptr endpoints inconsistent with storage")
        if np.any(np.diff(self.row_ptr) < 0):
            raise ValueError("row_ptr must be non-decreasing")
        if len(self.col_idx) != len(self.values):
            raise ValueError("col_idx and values lengths differ")
        if len(self.col_idx):
            if self.col_idx.min() < 0 or self.col_idx.max() >= self.ncols:
                raise ValueError("column index out of range")
            # strictly increasing within each row: the only non-increasing
            # steps in the concatenated col_idx may sit at row boundaries
            steps = np.flatnonzero(np.diff(self.col_idx) <= 0) + 1
            if steps.size and not np.all(np.isin(steps, self.row_ptr)):
                raise ValueError("columns not strictly increasing in a row")

    @property
    def nnz(self):
        return len(self.values)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @classmethod
    def from_coo(cls, nrows, ncols, rows, cols, vals, prune=True):
        """Build from triplets; duplicates are summed, zeros pruned."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.complex128)
        if rows.size:
            order = np.lexsort((cols, rows))
            rows, cols, vals = rows[order], cols[order], vals[order]
            first = np.ones(len(rows), dtype=bool)
            first[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            starts = np.flatnonzero(first)
            vals = np.add.reduceat(vals, starts)
            rows, cols = rows[starts], cols[starts]
            if prune:
                keep = vals != 0
                rows, cols, vals = rows[keep], cols[keep], vals[keep]
        row_ptr = np.zeros(nrows + 1, dtype=np.int64)
        if rows.size:
            np.cumsum(np.bincount(rows, minlength=nrows), out=row_ptr[1:])
        return cls(nrows, ncols, row_ptr, cols, vals)

    @classmethod
    def from_dense(cls, array, prune=True):
        array = np.asarray(array, dtype=np.complex128)
        if array.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = np.nonzero(array) if prune else np.indices(array.shape).reshape(2, -1)
        return cls.from_coo(array.shape[0], array.shape[1], rows, cols,
                            array[rows, cols], prune=prune)

    def to_dense(self):
        out = np.zeros((self.nrows, self.ncols), dtype=np.complex128)
        rows = np.repeat(np.arange(self.nrows), np.diff(self.row_ptr))
        out[rows, self.col_idx] = self.values
        return out

    def to_coo(self):
        rows = np.repeat(np.arange(self.nrows, dtype=np.int64),
                         np.diff(self.row_ptr))
        return rows, self.col_idx.copy(), self.values.copy()

    def diagonal(self):
        """Dense vector of diagonal values; absent entries are zero."""
        d = np.zeros(min(self.nrows, self.ncols), dtype=np.complex128)
        rows, cols, vals = self.to_coo()
        on = rows == cols
        d[rows[on]] = vals[on]
        return d

    def diagonal_stored_count(self):
        """How many diagonal positions are explicitly stored."""
        rows = np.repeat(np.arange(self.nrows, dtype=np.int64),
                         np.diff(self.row_ptr))
        return int(np.count_nonzero(rows == self.col_idx))

    def prune(self):
        """Copy without explicitly stored zero values."""
        rows, cols, vals = self.to_coo()
        keep = vals != 0
        return SparseComplexMatrix.from_coo(
            self.nrows, self.ncols, rows[keep], cols[keep], vals[keep])

    def __repr__(self):
        return (f"SparseComplexMatrix({self.nrows}x{self.ncols}, "
                f"nnz={self.nnz})")


class Permutation:
    """Bijection on 0..n-1 with its inverse; forward[i] is i's new position."""

    __slots__ = ("forward", "inverse")

    def __init__(self, forward, inverse=None):
        self.forward = np.ascontiguousarray(forward, dtype=np.int64)
        n = len(self.forward)
        if inverse is None:
            inverse = np.argsort(self.forward)
        self.inverse = np.ascontiguousarray(inverse, dtype=np.int64)
        if (len(self.inverse) != n
                or np.any(np.sort(self.forward) != np.arange(n))
                or np.any(self.inverse[self.forward] != np.arange(n))):
            raise ValueError("not a bijection with matching inverse")

    @classmethod
    def identity(cls, n):
        idx = np.arange(n, dtype=np.int64)
        return cls(idx, idx)

    @classmethod
    def from_order(cls, order):
        """Build from a new-position listing: order[k] is the original index
        placed at position k."""
        order = np.asarray(order, dtype=np.int64)
        return cls(np.argsort(order), order)

    def __len__(self):
        return len(self.forward)

    def is_identity(self):
        return bool(np.all(self.forward == np.arange(len(self.forward))))

    def save(self, path):
        """Newline-delimited forward map."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(str(int(i)) for i in self.forward))
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="ascii") as fh:
            vals = [int(line) for line in fh if line.strip()]
        return cls(np.array(vals, dtype=np.int64))

    def __repr__(self):
        return f"Permutation(n={len(self.forward)})"


def identity(n):
    """n-by-n identity matrix."""
    idx = np.arange(n, dtype=np.int64)
    return SparseComplexMatrix(n, n, np.arange(n + 1, dtype=np.int64), idx,
                               np.ones(n, dtype=np.complex128))


def kron(a, b):
    """Kronecker product; entry ((i*b.nrows+k),(j*b.ncols+l)) = a[i,j]*b[k,l]."""
    nr = a.nrows * b.nrows
    nc = a.ncols * b.ncols
    if nr > np.iinfo(np.int64).max // max(nc, 1):
        raise OverflowError("kron dimensions exceed index capacity")
    ar, ac, av = a.to_coo()
    br, bc, bv = b.to_coo()
    rows = (ar[:, None] * b.nrows + br[None, :]).ravel()
    cols = (ac[:, None] * b.ncols + bc[None, :]).ravel()
    vals = (av[:, None] * bv[None, :]).ravel()
    return SparseComplexMatrix.from_coo(nr, nc, rows, cols, vals, prune=False)


def transpose(a):
    rows, cols, vals = a.to_coo()
    return SparseComplexMatrix.from_coo(a.ncols, a.nrows, cols, rows, vals,
                                        prune=False)


def conjugate(a):
    return SparseComplexMatrix(a.nrows, a.ncols, a.row_ptr, a.col_idx,
                               np.conj(a.values), validate=False)


def adjoint(a):
    return conjugate(transpose(a))


def add(a, b, alpha=1.0, beta=1.0):
    """alpha*a + beta*b with merged sparsity; explicit zeros pruned."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    ar, ac, av = a.to_coo()
    br, bc, bv = b.to_coo()
    return SparseComplexMatrix.from_coo(
        a.nrows, a.ncols,
        np.concatenate([ar, br]), np.concatenate([ac, bc]),
        np.concatenate([alpha * av, beta * bv]))


def matmul(a, b):
    """a @ b. Row-merge product; adequate for the operator-sized matrices
    the model builders need."""
    if a.ncols != b.nrows:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    out_rows = []
    out_cols = []
    out_vals = []
    bp, bi, bv = b.row_ptr, b.col_idx, b.values
    for i in range(a.nrows):
        acc = {}
        for p in range(a.row_ptr[i], a.row_ptr[i + 1]):
            j = a.col_idx[p]
            v = a.values[p]
            for t in range(bp[j], bp[j + 1]):
                c = int(bi[t])
                acc[c] = acc.get(c, 0.0) + v * bv[t]
        for c, v in acc.items():
            out_rows.append(i)
            out_cols.append(c)
            out_vals.append(v)
    return SparseComplexMatrix.from_coo(a.nrows, b.ncols, out_rows, out_cols,
                                        out_vals)


def matvec(a, x):
    """y = A @ x."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (a.ncols,):
        raise ValueError(f"operand length {x.shape} does not match {a.ncols}")
    return kernels.csr_matvec(a.nrows, a.row_ptr, a.col_idx, a.values, x)


def permute(a, rows, cols):
    """b[rows.forward[i], cols.forward[j]] = a[i, j]. Keeps NNZ exactly."""
    if len(rows) != a.nrows or len(cols) != a.ncols:
        raise ValueError("permutation length does not match matrix shape")
    r, c, v = a.to_coo()
    return SparseComplexMatrix.from_coo(a.nrows, a.ncols, rows.forward[r],
                                        cols.forward[c], v, prune=False)


def vec(rho):
    """Column-stacked vector of a square matrix: index = col*dim + row."""
    if rho.nrows != rho.ncols:
        raise ValueError("vec requires a square matrix")
    return rho.to_dense().T.reshape(-1).copy()


def unvec(v, dim=None):
    """Inverse of vec; returns a dense dim-by-dim matrix."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if dim is None:
        dim = int(round(np.sqrt(len(v))))
    if dim * dim != len(v):
        raise ValueError("vector length is not a perfect square")
    return v.reshape(dim, dim).T.copy()


def write_matrix_market(a, path, comment=None):
    """Matrix Market coordinate complex general, 1-based indices."""
    rows, cols, vals = a.to_coo()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_MM_HEADER + "\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{a.nrows} {a.ncols} {a.nnz}\n")
        for r, c, v in zip(rows, cols, vals):
            fh.write(f"{r + 1} {c + 1} {v.real:.17g} {v.imag:.17g}\n")


def read_matrix_market(path):
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        fields = header.lower().split()
        if (len(fields) < 5 or fields[0] != "%%matrixmarket"
                or fields[1] != "matrix" or fields[2] != "coordinate"):
            raise ValueError(f"unsupported Matrix Market header: {header}")
        kind = fields[3]
        symmetry = fields[4]
        if symmetry != "general":
            raise ValueError(f"unsupported symmetry: {symmetry}")
        if kind not in ("complex", "real", "integer"):
            raise ValueError(f"unsupported field type: {kind}")
        line = fh.readline()
        while line.startswith("%") or not line.strip():
            line = fh.readline()
        nrows, ncols, nnz = (int(t) for t in line.split())
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.complex128)
        got = 0
        for line in fh:
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            parts = line.split()
            rows[got] = int(parts[0]) - 1
            cols[got] = int(parts[1]) - 1
            if kind == "complex":
                vals[got] = complex(float(parts[2]), float(parts[3]))
            else:
                vals[got] = float(parts[2])
            got += 1
        if got != nnz:
            raise ValueError(f"expected {nnz} entries, found {got}")
    return SparseComplexMatrix.from_coo(nrows, ncols, rows, cols, vals,
                                        prune=False)
