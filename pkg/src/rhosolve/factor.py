"""Sparse LU and incomplete LU with partial pivoting, triangular solves,
fill accounting, and the preconditioner condition estimate."""

from __future__ import annotations

import math

import numpy as np

from . import kernels, sparse
from .sparse import Permutation, SparseComplexMatrix

__all__ = ["LUFactors", "lu", "ilutp", "solve_lu", "condest",
           "export_factors", "SingularMatrixError",
           "PreconditionerBreakdownError"]


class SingularMatrixError(ValueError):
    """Complete factorization hit a zero pivot column."""


class PreconditionerBreakdownError(ValueError):
    """Incomplete factorization hit a zero pivot; retry with a smaller
    drop tolerance."""


class LUFactors:
    """Result of lu/ilutp: P_r A P_c = L U (approximately for incomplete).

    L is unit lower triangular, U upper triangular with nonzero diagonal.
    fill_factor = (NNZ(L) + NNZ(U)) / NNZ(A). Instances are immutable;
    solve_lu is reentrant and safe on shared factors.
    """

    __slots__ = ("L", "U", "row_perm", "col_perm", "fill_factor", "complete",
                 "drop_tol", "fill_limit", "n",
                 "_Lp", "_Li", "_Lx", "_Up", "_Ui", "_Ux", "_scatter_cols")

    def __init__(self, L, U, row_perm, col_perm, fill_factor, complete,
                 drop_tol, fill_limit, n, raw):
        self.L = L
        self.U = U
        self.row_perm = row_perm
        self.col_perm = col_perm
        self.fill_factor = fill_factor
        self.complete = complete
        self.drop_tol = drop_tol
        self.fill_limit = fill_limit
        self.n = n
        self._Lp, self._Li, self._Lx, self._Up, self._Ui, self._Ux = raw
        self._scatter_cols = col_perm.inverse

    def __repr__(self):
        kind = "complete" if self.complete else "incomplete"
        return (f"LUFactors(n={self.n}, {kind}, "
                f"fill_factor={self.fill_factor:.3g})")


def _csc_to_csr_matrix(n, cp, ci, cx):
    # stable sort by row keeps the per-column scan order, so columns come
    # out strictly increasing within each row
    order = np.argsort(ci, kind="stable")
    cols = np.repeat(np.arange(n, dtype=np.int64), np.diff(cp))[order]
    rows_sorted = ci[order]
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows_sorted, minlength=n), out=row_ptr[1:])
    return SparseComplexMatrix(n, n, row_ptr, cols, cx[order], validate=False)


def _factor(a, col_perm, drop_tol, fill_limit):
    if a.nrows != a.ncols:
        raise ValueError("factorization expects a square matrix")
    n = a.nrows
    if a.nnz == 0:
        raise SingularMatrixError("zero pivot at elimination step 0")
    if col_perm is not None and len(col_perm) != n:
        raise ValueError("column permutation length does not match matrix")

    at = sparse.transpose(a)  # CSR of a^T doubles as CSC of a
    q = col_perm.inverse if col_perm is not None else None

    incomplete = drop_tol > 0.0 or not math.isinf(fill_limit)
    row_norms = None
    if drop_tol > 0.0:
        mags = np.abs(a.values.real) + np.abs(a.values.imag)
        row_norms = np.zeros(n, dtype=np.float64)
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(a.row_ptr))
        np.maximum.at(row_norms, rows, mags)
    if math.isinf(fill_limit):
        fill_cap = -1
    else:
        fill_cap = int(math.ceil(fill_limit * a.nnz / n))

    out = kernels.factorize(n, at.row_ptr, at.col_idx, at.values, q,
                            float(drop_tol), fill_cap, row_norms)
    Lp, Li, Lx, Up, Ui, Ux, pinv, fail = out
    if fail >= 0:
        msg = f"zero pivot at elimination step {fail}"
        raise (PreconditionerBreakdownError(msg) if incomplete
               else SingularMatrixError(msg))

    L = _csc_to_csr_matrix(n, Lp, Li, Lx)
    U = _csc_to_csr_matrix(n, Up, Ui, Ux)
    return LUFactors(
        L=L, U=U,
        row_perm=Permutation(pinv),
        col_perm=col_perm if col_perm is not None else Permutation.identity(n),
        fill_factor=(len(Lx) + len(Ux)) / a.nnz,
        complete=not incomplete,
        drop_tol=float(drop_tol) if incomplete else None,
        fill_limit=float(fill_limit) if incomplete else None,
        n=n, raw=(Lp, Li, Lx, Up, Ui, Ux))


def lu(a, col_perm=None):
    """Complete sparse LU with partial pivoting (threshold 1.0, i.e. the
    largest-magnitude row pivots). col_perm is applied before elimination."""
    return _factor(a, col_perm, 0.0, math.inf)


def ilutp(a, d=1e-4, p=300.0, col_perm=None):
    """Incomplete LU with threshold dropping, per-column fill budget, and
    the same partial pivoting as lu.

    Entries below d times their original row's infinity norm are dropped;
    each elimination column keeps at most ceil(p*NNZ(a)/n) entries across L
    and U (pivot and unit diagonal always kept). d=0 with p=inf reproduces
    the complete factorization exactly.
    """
    if d < 0:
        raise ValueError("drop tolerance d must be >= 0")
    if not p >= 1:
        raise ValueError("fill limit p must be >= 1")
    return _factor(a, col_perm, d, float(p))


def solve_lu(f, b):
    """x with A x ~ b through the stored factors: forward and backward
    substitution plus the row/column permutation bookkeeping."""
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (f.n,):
        raise ValueError(f"rhs length {b.shape} does not match n={f.n}")
    y = np.empty(f.n, dtype=np.complex128)
    y[f.row_perm.forward] = b
    kernels.lower_solve(f._Lp, f._Li, f._Lx, y)
    kernels.upper_solve(f._Up, f._Ui, f._Ux, y)
    x = np.empty(f.n, dtype=np.complex128)
    x[f._scatter_cols] = y
    return x


def condest(f):
    """Infinity norm of the approximate inverse applied to the all-ones
    vector; a lower bound on the norm of the approximate inverse."""
    e = np.ones(f.n, dtype=np.complex128)
    x = solve_lu(f, e)
    return float(np.max(np.abs(x)))


def export_factors(f, prefix):
    """Write L/U as Matrix Market files and the permutations as
    newline-delimited integer lists: <prefix>_L.mtx, _U.mtx, _rowperm.txt,
    _colperm.txt."""
    sparse.write_matrix_market(f.L, f"{prefix}_L.mtx")
    sparse.write_matrix_market(f.U, f"{prefix}_U.mtx")
    f.row_perm.save(f"{prefix}_rowperm.txt")
    f.col_perm.save(f"{prefix}_colperm.txt")
