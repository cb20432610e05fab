"""Vectorized Lindblad superoperator and its two solver-ready variants.

Column-stacking convention throughout: vec(A X B) = (B^T kron A) vec(X), so
the commutator and dissipator terms become Kronecker products acting on the
column-stacked density matrix.
"""

from __future__ import annotations

import numpy as np

from . import sparse
from .sparse import SparseComplexMatrix

__all__ = ["LiouvillianSystem", "build_liouvillian", "shift",
           "build_modified", "default_weight", "DEFAULT_SIGMA"]

DEFAULT_SIGMA = 1e-15


class LiouvillianSystem:
    """Superoperator matrix plus Hilbert dimension and variant tag.

    variant is one of "plain", "shifted" (carries sigma), or "modified"
    (carries weight and the right-hand side (w, 0, ..., 0)).
    """

    __slots__ = ("matrix", "hilbert_dim", "variant", "sigma", "weight", "rhs")

    def __init__(self, matrix, hilbert_dim, variant, sigma=None, weight=None,
                 rhs=None):
        if matrix.nrows != matrix.ncols:
            raise ValueError("superoperator must be square")
        if matrix.nrows != hilbert_dim * hilbert_dim:
            raise ValueError("matrix side must equal hilbert_dim squared")
        if variant not in ("plain", "shifted", "modified"):
            raise ValueError(f"unknown variant {variant!r}")
        self.matrix = matrix
        self.hilbert_dim = int(hilbert_dim)
        self.variant = variant
        self.sigma = sigma
        self.weight = weight
        self.rhs = rhs

    @property
    def n(self):
        return self.matrix.nrows

    def __repr__(self):
        return (f"LiouvillianSystem(D={self.hilbert_dim}, "
                f"variant={self.variant!r}, nnz={self.matrix.nnz})")


def build_liouvillian(H, collapse_ops):
    """Lindblad generator for Hamiltonian H and a list of collapse operators.

    Builds -i(I kron H - H^T kron I) plus, per collapse operator C,
    conj(C) kron C - (I kron C'C + (C'C)^T kron I) / 2, with hbar = 1.
    """
    hm = H.matrix
    D = hm.nrows
    herm_dev = sparse.add(hm, sparse.adjoint(hm), 1.0, -1.0)
    if herm_dev.nnz and np.max(np.abs(herm_dev.values)) > 1e-12:
        raise ValueError("Hamiltonian is not Hermitian within 1e-12")
    eye = sparse.identity(D)
    L = sparse.add(sparse.kron(eye, hm),
                   sparse.kron(sparse.transpose(hm), eye), -1j, 1j)
    for c in collapse_ops:
        if c.dims != H.dims:
            raise ValueError(
                f"collapse operator dims {c.dims} do not match H {H.dims}")
        cm = c.matrix
        cdc = sparse.matmul(sparse.adjoint(cm), cm)
        L = sparse.add(L, sparse.kron(sparse.conjugate(cm), cm))
        L = sparse.add(L, sparse.kron(eye, cdc), 1.0, -0.5)
        L = sparse.add(L, sparse.kron(sparse.transpose(cdc), eye), 1.0, -0.5)
    return LiouvillianSystem(L, D, "plain")


def shift(L, sigma=DEFAULT_SIGMA):
    """Subtract sigma from the diagonal; every diagonal position becomes an
    explicitly stored entry (eigeniteration solvers rely on that)."""
    if L.variant != "plain":
        raise ValueError(f"shift expects the plain variant, got {L.variant!r}")
    if sigma == 0:
        raise ValueError("sigma must be nonzero")
    n = L.n
    r, c, v = L.matrix.to_coo()
    diag = np.arange(n, dtype=np.int64)
    m = SparseComplexMatrix.from_coo(
        n, n,
        np.concatenate([r, diag]),
        np.concatenate([c, diag]),
        np.concatenate([v, np.full(n, -sigma, dtype=np.complex128)]),
        prune=False)
    return LiouvillianSystem(m, L.hilbert_dim, "shifted", sigma=sigma)


def default_weight(L, mode="abs"):
    """Trace-row weight: mean |diagonal| of the plain Liouvillian ("abs"),
    or the magnitude of the signed mean ("signed")."""
    d = L.matrix.diagonal()
    if mode == "abs":
        w = float(np.mean(np.abs(d)))
    elif mode == "signed":
        w = float(abs(np.mean(d)))
    else:
        raise ValueError(f"unknown weight mode {mode!r}")
    if not w > 0:
        raise ValueError("diagonal average vanished; supply w explicitly")
    return w


def build_modified(L, w=None, weight_mode="abs"):
    """Add w times the trace row: ones (scaled by w) in row 0 at the columns
    holding diagonal elements of the column-stacked density matrix. The
    right-hand side becomes (w, 0, ..., 0)."""
    if L.variant != "plain":
        raise ValueError(
            f"build_modified expects the plain variant, got {L.variant!r}")
    if w is None:
        w = default_weight(L, weight_mode)
    w = float(w)
    if not w > 0:
        raise ValueError("w must be positive")
    D = L.hilbert_dim
    n = L.n
    r, c, v = L.matrix.to_coo()
    tcols = np.arange(D, dtype=np.int64) * (D + 1)
    m = SparseComplexMatrix.from_coo(
        n, n,
        np.concatenate([r, np.zeros(D, dtype=np.int64)]),
        np.concatenate([c, tcols]),
        np.concatenate([v, np.full(D, w, dtype=np.complex128)]),
        prune=False)
    rhs = np.zeros(n, dtype=np.complex128)
    rhs[0] = w
    return LiouvillianSystem(m, D, "modified", weight=w, rhs=rhs)
