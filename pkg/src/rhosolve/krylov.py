"""Preconditioned iterative solvers: restarted GMRES(m) and BiCGSTAB.

Both solve A x = b for general complex non-symmetric A with optional left
preconditioning by LU-type factors: the iteration runs on the operator
x -> solve_lu(M, A @ x). Convergence is monitored on the cheap preconditioned
residual; a result only reports converged after the true residual
||b - A x||_2 passes the same relative tolerance, so converged implies
final_residual <= tol * ||b||_2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sparse
from .factor import solve_lu
from .liouville import LiouvillianSystem

__all__ = ["IterOptions", "IterResult", "gmres", "bicgstab"]


@dataclass
class IterOptions:
    """Solver options: tol is the relative L2 residual target."""

    tol: float = 1e-10
    max_iter: int = 1000
    restart_m: int = 20
    preconditioner: object = None

    def check(self):
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.restart_m < 1:
            raise ValueError("restart_m must be >= 1")


@dataclass
class IterResult:
    """Solution vector plus convergence bookkeeping. final_residual is the
    true absolute L2 residual ||b - A x||_2 at exit."""

    x: np.ndarray
    iterations: int
    final_residual: float
    converged: bool
    breakdown: bool


def _unwrap(a):
    return a.matrix if isinstance(a, LiouvillianSystem) else a


def _norm(v):
    return float(np.linalg.norm(v))


def _trace_write(trace, iteration, residual):
    if trace is not None:
        trace.write(f"{iteration},{residual:.17g}\n")


def gmres(a, b, opts=None, trace=None):
    """Restarted GMRES(m) with modified Gram-Schmidt Arnoldi and Givens
    rotations; restarts continue from the current iterate; the initial guess
    is the zero vector. Arnoldi happy breakdown is treated as an exact solve
    within the current subspace. Non-convergence is flagged, never raised.

    trace, when given, receives "iteration,residual" CSV rows of the
    monitored (preconditioned) residual.
    """
    A = _unwrap(a)
    opts = opts if opts is not None else IterOptions()
    opts.check()
    b = np.asarray(b, dtype=np.complex128)
    if A.nrows != A.ncols or b.shape != (A.nrows,):
        raise ValueError("system must be square with matching rhs length")
    n = A.nrows
    M = opts.preconditioner

    def psolve(v):
        return solve_lu(M, v) if M is not None else v

    bnorm = _norm(b)
    if bnorm == 0.0:
        return IterResult(np.zeros(n, dtype=np.complex128), 0, 0.0, True,
                          False)
    pb = psolve(b)
    pbnorm = _norm(pb)
    if pbnorm == 0.0 or not np.isfinite(pbnorm):
        return IterResult(np.zeros(n, dtype=np.complex128), 0, bnorm, False,
                          True)

    m = opts.restart_m
    x = np.zeros(n, dtype=np.complex128)
    target = opts.tol * pbnorm
    total = 0
    converged = False
    breakdown = False
    invariant = False
    prev_true = np.inf

    V = np.empty((m + 1, n), dtype=np.complex128)
    H = np.zeros((m + 1, m), dtype=np.complex128)
    cs = np.zeros(m, dtype=np.float64)
    sn = np.zeros(m, dtype=np.complex128)
    g = np.zeros(m + 1, dtype=np.complex128)

    while total < opts.max_iter and not converged and not invariant:
        r = pb - psolve(sparse.matvec(A, x)) if total else pb.copy()
        beta = _norm(r)
        monitor_hit = beta <= target
        if not monitor_hit:
            V[0] = r / beta
            g[:] = 0.0
            g[0] = beta
            H[:, :] = 0.0
            j = 0
            res = beta
            while j < m and total < opts.max_iter:
                w = psolve(sparse.matvec(A, V[j]))
                total += 1
                for i in range(j + 1):
                    H[i, j] = np.vdot(V[i], w)
                    w -= H[i, j] * V[i]
                hnext = _norm(w)
                if hnext > 0.0:
                    V[j + 1] = w / hnext
                # Givens: zero the subdiagonal, update the rotated rhs
                for i in range(j):
                    t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                    H[i + 1, j] = -np.conj(sn[i]) * H[i, j] + cs[i] * H[i + 1, j]
                    H[i, j] = t
                alpha = H[j, j]
                denom = np.hypot(abs(alpha), hnext)
                if denom == 0.0:
                    cs[j], sn[j] = 1.0, 0.0
                elif alpha == 0.0:
                    cs[j], sn[j] = 0.0, 1.0
                else:
                    cs[j] = abs(alpha) / denom
                    sn[j] = (alpha / abs(alpha)) * (hnext / denom)
                H[j, j] = cs[j] * alpha + sn[j] * hnext
                g[j + 1] = -np.conj(sn[j]) * g[j]
                g[j] = cs[j] * g[j]
                res = abs(g[j + 1])
                j += 1
                _trace_write(trace, total, res)
                if hnext == 0.0:
                    invariant = True
                    break
                if res <= target:
                    break
            if np.any(np.diagonal(H)[:j] == 0.0):
                breakdown = True  # degenerate subspace, no usable update
                break
            # y solves the rotated upper-triangular least-squares system
            y = np.zeros(j, dtype=np.complex128)
            for i in range(j - 1, -1, -1):
                y[i] = (g[i] - H[i, i + 1:j] @ y[i + 1:j]) / H[i, i]
            x = x + y @ V[:j]
            monitor_hit = res <= target or invariant
        if monitor_hit:
            true_res = _norm(b - sparse.matvec(A, x))
            if true_res <= opts.tol * bnorm:
                converged = True
            elif invariant or true_res >= 0.5 * prev_true:
                break  # exact subspace or stalled: give up honestly
            else:
                prev_true = true_res
                target *= 0.1

    final = _norm(b - sparse.matvec(A, x))
    return IterResult(x, total, final, converged, breakdown)


def bicgstab(a, b, opts=None, trace=None):
    """BiCGSTAB with left preconditioning. Breakdown (the shadow-residual
    inner product or the stabilization weight underflowing) is flagged,
    never raised; convergence is checked before the breakdown tests.

    trace, when given, receives "iteration,residual" CSV rows of the
    monitored (preconditioned) residual.
    """
    A = _unwrap(a)
    opts = opts if opts is not None else IterOptions()
    opts.check()
    b = np.asarray(b, dtype=np.complex128)
    if A.nrows != A.ncols or b.shape != (A.nrows,):
        raise ValueError("system must be square with matching rhs length")
    n = A.nrows
    M = opts.preconditioner

    def psolve(v):
        return solve_lu(M, v) if M is not None else v

    bnorm = _norm(b)
    if bnorm == 0.0:
        return IterResult(np.zeros(n, dtype=np.complex128), 0, 0.0, True,
                          False)
    pb = psolve(b)
    pbnorm = _norm(pb)
    if pbnorm == 0.0 or not np.isfinite(pbnorm):
        return IterResult(np.zeros(n, dtype=np.complex128), 0, bnorm, False,
                          True)

    x = np.zeros(n, dtype=np.complex128)
    r = pb.copy()
    rhat = r.copy()
    rhat_norm = _norm(rhat)
    rho_prev = 1.0 + 0.0j
    alpha = 1.0 + 0.0j
    omega = 1.0 + 0.0j
    v = np.zeros(n, dtype=np.complex128)
    p = np.zeros(n, dtype=np.complex128)
    target = opts.tol * pbnorm
    converged = False
    breakdown = False
    prev_true = np.inf
    it = 0

    while it < opts.max_iter:
        rnorm = _norm(r)
        _trace_write(trace, it, rnorm)
        if rnorm <= target:
            true_res = _norm(b - sparse.matvec(A, x))
            if true_res <= opts.tol * bnorm:
                converged = True
                break
            if true_res >= 0.5 * prev_true:
                break
            prev_true = true_res
            target *= 0.1
        rho = np.vdot(rhat, r)
        if abs(rho) < 1e-30 or abs(rho) < 1e-16 * rhat_norm * rnorm:
            breakdown = True
            break
        if it == 0:
            p[:] = r
        else:
            beta = (rho / rho_prev) * (alpha / omega)
            p = r + beta * (p - omega * v)
        v = psolve(sparse.matvec(A, p))
        denom = np.vdot(rhat, v)
        if denom == 0.0:
            breakdown = True
            break
        alpha = rho / denom
        s = r - alpha * v
        it += 1
        snorm = _norm(s)
        if snorm <= target:
            x = x + alpha * p
            true_res = _norm(b - sparse.matvec(A, x))
            if true_res <= opts.tol * bnorm:
                converged = True
                break
            if true_res >= 0.5 * prev_true:
                break
            # keep going from the half-updated iterate: restart the
            # recurrence so its invariants hold
            prev_true = true_res
            target *= 0.1
            r = s
            rhat = r.copy()
            rhat_norm = _norm(rhat)
            rho_prev = 1.0 + 0.0j
            alpha = 1.0 + 0.0j
            omega = 1.0 + 0.0j
            v[:] = 0.0
            p[:] = 0.0
            continue
        t = psolve(sparse.matvec(A, s))
        tt = np.vdot(t, t)
        if tt == 0.0:
            breakdown = True
            break
        omega = np.vdot(t, s) / tt
        x = x + alpha * p + omega * s
        r = s - omega * t
        rho_prev = rho
        if omega == 0.0:
            breakdown = True
            break

    final = _norm(b - sparse.matvec(A, x))
    return IterResult(x, it, final, converged, breakdown)
