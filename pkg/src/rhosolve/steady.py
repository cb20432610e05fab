"""Steady-state algorithms: direct solve on the trace-modified system,
preconditioned Krylov iteration, shifted inverse-power eigeniteration (with
direct or doubly-iterative inner solves), a dense brute-force oracle, and
solution validation."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import factor, krylov, liouville, ordering, sparse

__all__ = ["SteadyStateResult", "solve_direct", "solve_iterative",
           "inverse_power", "dense_oracle", "validate", "ValidationReport",
           "DegenerateSteadyStateWarning", "InnerSolverError",
           "PowerIterationError", "DEFAULT_SEED"]

DEFAULT_SEED = 12345
MAX_OUTER = 50


class DegenerateSteadyStateWarning(UserWarning):
    """The null space has more than one dimension; the steady state is not
    unique and the returned density matrix is one representative."""


class InnerSolverError(RuntimeError):
    """The inner linear solve of the inverse-power iteration produced no
    usable iterate (breakdown or non-finite values)."""


class PowerIterationError(RuntimeError):
    """Inverse-power iteration exceeded the outer iteration budget."""


@dataclass
class SteadyStateResult:
    """Steady-state density matrix plus solver diagnostics.

    residual is ||L vec(rho)||_2 against the plain (unshifted, unmodified)
    Liouvillian, recomputed on the final Hermitized, trace-normalized rho.
    """

    rho: np.ndarray
    method: str
    ordering: str
    residual: float
    iterations: int
    fill_factor: float
    condest: float | None
    build_time: float
    factor_time: float
    solve_time: float
    converged: bool = True
    breakdown: bool = False
    seed: int | None = None


def _postprocess(x, D, plain_matrix):
    """Hermitize, trace-normalize, and measure the plain-system residual."""
    rho = sparse.unvec(np.asarray(x, dtype=np.complex128), D)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho)
    if tr != 0:
        rho = rho / tr
    residual = float(np.linalg.norm(sparse.matvec(plain_matrix,
                                                  rho.T.reshape(-1))))
    return rho, residual


def _prepare(system, ordering_name):
    """Apply the requested ordering to a solver-ready system.

    Returns (matrix, rhs, row_scatter, unpermute, col_perm, label):
    row_scatter permutes right-hand sides into the working row space,
    unpermute maps solutions back to original unknowns (None when the
    solution space is untouched), col_perm feeds the factorization.
    """
    m = system.matrix
    rhs = system.rhs
    n = m.nrows
    if ordering_name == "natural":
        return m, rhs, None, None, None, "natural"
    if ordering_name == "rcm":
        p = ordering.rcm(m)
        pm = sparse.permute(m, p, p)
        prhs = None
        if rhs is not None:
            prhs = np.empty_like(rhs)
            prhs[p.forward] = rhs
        return pm, prhs, p, p, None, "rcm"
    if ordering_name == "cmd":
        label = "cmd"
        diag_stored = m.diagonal_stored_count()
        if diag_stored < n:
            rowp = ordering.weighted_mbm(m)
            m = sparse.permute(m, rowp, sparse.Permutation.identity(n))
            if rhs is not None:
                prhs = np.empty_like(rhs)
                prhs[rowp.forward] = rhs
                rhs = prhs
            label = "cmd+mbm"
        colp = ordering.col_min_degree(m)
        return m, rhs, None, None, colp, label
    raise ValueError(f"unknown ordering {ordering_name!r}")


def _require_plain(L):
    if L.variant != "plain":
        raise ValueError(f"expected the plain variant, got {L.variant!r}")


def solve_direct(L, ordering_name="natural", w=None):
    """Steady state by one complete-LU solve of the trace-modified system."""
    _require_plain(L)
    t0 = time.perf_counter()
    modified = liouville.build_modified(L, w)
    mat, rhs, _, unperm, colp, label = _prepare(modified, ordering_name)
    t1 = time.perf_counter()
    f = factor.lu(mat, colp)
    t2 = time.perf_counter()
    x = factor.solve_lu(f, rhs)
    if unperm is not None:
        x = x[unperm.forward]
    t3 = time.perf_counter()
    rho, residual = _postprocess(x, L.hilbert_dim, L.matrix)
    return SteadyStateResult(
        rho=rho, method="direct", ordering=label, residual=residual,
        iterations=0, fill_factor=f.fill_factor, condest=None,
        build_time=t1 - t0, factor_time=t2 - t1,
        solve_time=time.perf_counter() - t3 + (t3 - t2))


def solve_iterative(L, ordering_name="natural", solver="gmres", d=1e-4,
                    p=300.0, tol=1e-14, restart_m=20, max_iter=1000, w=None):
    """Steady state by preconditioned Krylov iteration on the trace-modified
    system; the preconditioner is an incomplete LU of the ordered matrix.

    Non-convergence and solver breakdown are reported on the result, not
    raised; preconditioner breakdown raises."""
    _require_plain(L)
    if solver not in ("gmres", "bicgstab"):
        raise ValueError(f"unknown solver {solver!r}")
    t0 = time.perf_counter()
    modified = liouville.build_modified(L, w)
    mat, rhs, _, unperm, colp, label = _prepare(modified, ordering_name)
    t1 = time.perf_counter()
    f = factor.ilutp(mat, d=d, p=p, col_perm=colp)
    t2 = time.perf_counter()
    opts = krylov.IterOptions(tol=tol, max_iter=max_iter, restart_m=restart_m,
                              preconditioner=f)
    run = krylov.gmres if solver == "gmres" else krylov.bicgstab
    res = run(mat, rhs, opts)
    x = res.x
    if unperm is not None:
        x = x[unperm.forward]
    t3 = time.perf_counter()
    rho, residual = _postprocess(x, L.hilbert_dim, L.matrix)
    return SteadyStateResult(
        rho=rho, method=f"iterative-{solver}", ordering=label,
        residual=residual, iterations=res.iterations,
        fill_factor=f.fill_factor, condest=factor.condest(f),
        build_time=t1 - t0, factor_time=t2 - t1,
        solve_time=time.perf_counter() - t3 + (t3 - t2),
        converged=res.converged, breakdown=res.breakdown)


def _start_vector(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def inverse_power(L, sigma=liouville.DEFAULT_SIGMA, tol=1e-14,
                  inner="direct", ordering_name="natural", solver="gmres",
                  d=1e-4, p=300.0, restart_m=20, max_iter=1000,
                  seed=DEFAULT_SEED):
    """Steady state as the null eigenvector of the shifted Liouvillian by
    inverse-power iteration.

    Starts from a deterministic pseudo-random complex vector (seed recorded
    on the result). Each outer step solves (L - sigma I) y = x and
    normalizes; the iteration stops when the phase-aligned successive
    difference drops below tol in L2, or the plain-system residual of the
    iterate drops below tol in the infinity norm. inner="direct" factors
    once; inner="iterative" builds an incomplete-LU preconditioner and runs
    the chosen Krylov solver to tol/10 each step.
    """
    _require_plain(L)
    if inner not in ("direct", "iterative"):
        raise ValueError(f"unknown inner solve {inner!r}")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    t0 = time.perf_counter()
    shifted = liouville.shift(L, sigma)
    mat, _, rowp, unperm, colp, label = _prepare(shifted, ordering_name)
    plain_mat = (sparse.permute(L.matrix, rowp, rowp)
                 if rowp is not None else L.matrix)
    t1 = time.perf_counter()
    if inner == "direct":
        f = factor.lu(mat, colp)
        cond = None

        def inner_solve(v):
            return factor.solve_lu(f, v)
    else:
        f = factor.ilutp(mat, d=d, p=p, col_perm=colp)
        cond = factor.condest(f)
        opts = krylov.IterOptions(tol=tol / 10, max_iter=max_iter,
                                  restart_m=restart_m, preconditioner=f)
        run = krylov.gmres if solver == "gmres" else krylov.bicgstab

        def inner_solve(v):
            r = run(mat, v, opts)
            if r.breakdown or not np.all(np.isfinite(r.x)):
                raise InnerSolverError(
                    "inner Krylov solve broke down; try a smaller drop "
                    "tolerance or a larger fill budget")
            if np.linalg.norm(r.x) == 0.0:
                raise InnerSolverError("inner Krylov solve made no progress")
            return r.x
    t2 = time.perf_counter()

    n = mat.nrows
    x = _start_vector(n, seed)
    outer = 0
    converged = False
    while outer < MAX_OUTER:
        y = inner_solve(x)
        ny = np.linalg.norm(y)
        if ny == 0.0 or not np.isfinite(ny):
            raise InnerSolverError("inner solve returned an unusable vector")
        y = y / ny
        outer += 1
        ov = np.vdot(y, x)
        aligned = y * (ov / abs(ov)) if ov != 0 else y
        diff = np.linalg.norm(aligned - x)
        resid_inf = float(np.max(np.abs(sparse.matvec(plain_mat, y))))
        x = y
        if diff <= tol or resid_inf <= tol:
            converged = True
            break
    if not converged:
        raise PowerIterationError(
            f"no convergence within {MAX_OUTER} outer iterations")
    if unperm is not None:
        x = x[unperm.forward]
    t3 = time.perf_counter()
    rho, residual = _postprocess(x, L.hilbert_dim, L.matrix)
    return SteadyStateResult(
        rho=rho,
        method="power-direct" if inner == "direct"
        else "power-doubly-iterative",
        ordering=label, residual=residual, iterations=outer,
        fill_factor=f.fill_factor, condest=cond,
        build_time=t1 - t0, factor_time=t2 - t1,
        solve_time=time.perf_counter() - t3 + (t3 - t2), seed=seed)


def dense_oracle(L):
    """Brute-force steady state at small dimension: the smallest singular
    vector of the dense plain Liouvillian, unit-trace normalized.

    Warns DegenerateSteadyStateWarning when the null space has more than one
    dimension."""
    _require_plain(L)
    D = L.hilbert_dim
    if D > 12:
        raise ValueError(f"dense oracle limited to D <= 12, got {D}")
    dense = L.matrix.to_dense()
    _, s, vh = np.linalg.svd(dense)
    small = s < 1e-11 * s[0]
    nsmall = max(int(np.count_nonzero(small)), 1)
    if nsmall > 1:
        warnings.warn(
            f"steady state is degenerate: {nsmall} null directions",
            DegenerateSteadyStateWarning, stacklevel=2)
    # pick the null vector with the largest trace magnitude (degenerate
    # bases may contain near-traceless combinations)
    best = None
    best_tr = -1.0
    for k in range(1, nsmall + 1):
        v = vh[-k].conj()
        tr = abs(np.trace(sparse.unvec(v, D)))
        if tr > best_tr:
            best_tr = tr
            best = v
    if best_tr < 1e-12:
        raise ValueError("null vector is traceless; cannot normalize")
    rho = sparse.unvec(best, D)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho)


@dataclass
class ValidationReport:
    """Per-check pass/fail for a steady-state solution. Checks that do not
    apply at the given dimension are recorded as skipped (None)."""

    trace_dev: float
    trace_ok: bool
    herm_dev: float
    herm_ok: bool
    min_eigval: float | None
    positive_ok: bool | None
    residual: float
    residual_ok: bool
    oracle_dev: float | None
    oracle_ok: bool | None
    warnings: list = field(default_factory=list)

    @property
    def all_passed(self):
        checks = [self.trace_ok, self.herm_ok, self.positive_ok,
                  self.residual_ok, self.oracle_ok]
        return all(c for c in checks if c is not None)

    def lines(self):
        def fmt(name, value, ok):
            if ok is None:
                return f"{name:12s} skipped"
            return f"{name:12s} {'PASS' if ok else 'FAIL'}  ({value:.3e})"

        out = [
            fmt("trace", self.trace_dev, self.trace_ok),
            fmt("hermitian", self.herm_dev, self.herm_ok),
            fmt("positive", self.min_eigval if self.min_eigval is not None
                else 0.0, self.positive_ok),
            fmt("residual", self.residual, self.residual_ok),
            fmt("oracle", self.oracle_dev if self.oracle_dev is not None
                else 0.0, self.oracle_ok),
        ]
        out.extend(f"warning: {w}" for w in self.warnings)
        return out

    def __str__(self):
        return "\n".join(self.lines())


def validate(result, L):
    """Check trace, Hermiticity, positivity (dense eigenvalues at D <= 64),
    plain-system residual, and oracle agreement (D <= 12) of a result."""
    _require_plain(L)
    rho = result.rho if isinstance(result, SteadyStateResult) else result
    D = L.hilbert_dim
    trace_dev = abs(np.trace(rho) - 1.0)
    herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
    residual = float(np.linalg.norm(
        sparse.matvec(L.matrix, np.asarray(rho).T.reshape(-1))))
    min_eig = None
    positive_ok = None
    if D <= 64:
        min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
        positive_ok = min_eig >= -1e-8
    oracle_dev = None
    oracle_ok = None
    caught = []
    if D <= 12:
        with warnings.catch_warnings(record=True) as grabbed:
            warnings.simplefilter("always")
            ref = dense_oracle(L)
        caught = [str(w.message) for w in grabbed]
        for msg in caught:
            warnings.warn(msg, DegenerateSteadyStateWarning, stacklevel=2)
        oracle_dev = float(np.max(np.abs(rho - ref)))
        oracle_ok = oracle_dev <= 1e-9
    return ValidationReport(
        trace_dev=trace_dev, trace_ok=trace_dev <= 1e-12,
        herm_dev=herm_dev, herm_ok=herm_dev <= 1e-10,
        min_eigval=min_eig, positive_ok=positive_ok,
        residual=residual, residual_ok=residual <= 1e-10,
        oracle_dev=oracle_dev, oracle_ok=oracle_ok, warnings=caught)
