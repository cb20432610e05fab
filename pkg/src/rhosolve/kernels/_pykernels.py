"""Pure-Python numerical kernels (fallback backend).

Mirrors the compiled backend operation for operation: magnitudes are measured
as |re| + |im|, column updates run in increasing pivotal order, pivot ties
break to the lowest original row index, and divisions go through an explicit
conjugate-reciprocal so that both backends produce bit-identical factors.
"""

import heapq

import numpy as np

BACKEND_NAME = "python"


def _cmul(a, b):
    """Elementwise complex product via separate real ufuncs.

    numpy's native complex multiply may fuse multiply-adds; splitting into
    individually rounded real operations keeps the result bit-identical to
    the compiled backend's plain (ac - bd, ad + bc) arithmetic.
    """
    out = np.empty(np.broadcast(a, b).shape, dtype=np.complex128)
    ar, ai = a.real, a.imag
    br, bi = b.real, b.imag
    out.real = ar * br - ai * bi
    out.imag = ar * bi + ai * br
    return out


def csr_matvec(nrows, row_ptr, col_idx, values, x):
    """y = A @ x for CSR arrays. Sequential per-row summation.

    Rows are grouped by entry count and summed term by term with separate
    vector adds; each row accumulates in storage order, matching the
    compiled backend's scalar loop exactly.
    """
    y = np.zeros(nrows, dtype=np.complex128)
    if len(values) == 0:
        return y
    prod = _cmul(values, x[col_idx])
    lens = np.diff(row_ptr)
    for ln in np.unique(lens):
        if ln == 0:
            continue
        rows = np.flatnonzero(lens == ln)
        idx = row_ptr[rows, None] + np.arange(ln)[None, :]
        block = prod[idx]
        acc = block[:, 0].copy()
        for t in range(1, ln):
            acc += block[:, t]
        y[rows] = acc
    return y


def _recip(z):
    # conj(z) / |z|^2 with plain double arithmetic; identical across backends
    d = 1.0 / (z.real * z.real + z.imag * z.imag)
    return complex(z.real * d, -z.imag * d)


def lower_solve(Lp, Li, Lx, y):
    """In-place forward solve L y' = y, unit lower triangular CSC.

    Row indices are pivotal; each column stores its unit diagonal first.
    """
    n = len(Lp) - 1
    for c in range(n):
        p0 = Lp[c] + 1  # skip unit diagonal
        p1 = Lp[c + 1]
        if p0 < p1:
            y[Li[p0:p1]] -= _cmul(Lx[p0:p1], y[c])


def upper_solve(Up, Ui, Ux, y):
    """In-place backward solve U y' = y, upper triangular CSC.

    Each column stores its pivot (diagonal) last.
    """
    n = len(Up) - 1
    for c in range(n - 1, -1, -1):
        p0 = Up[c]
        p1 = Up[c + 1] - 1  # last entry is the pivot
        xc = y[c] * _recip(Ux[p1])
        y[c] = xc
        if p0 < p1:
            y[Ui[p0:p1]] -= _cmul(Ux[p0:p1], xc)


def _grow(idx, val, need):
    if need <= len(idx):
        return idx, val
    cap = max(2 * len(idx), need)
    nidx = np.empty(cap, dtype=np.int64)
    nval = np.empty(cap, dtype=np.complex128)
    nidx[: len(idx)] = idx
    nval[: len(val)] = val
    return nidx, nval


def factorize(n, Ap, Ai, Ax, q, drop_tol, fill_cap, row_norms):
    """Left-looking sparse LU with threshold partial pivoting and optional
    incomplete dropping.

    Input is CSC (Ap/Ai/Ax). q[k] names the original column eliminated at
    step k (None means natural order). drop_tol == 0 with fill_cap < 0 gives
    the complete factorization; otherwise entries whose |re|+|im| magnitude
    falls below drop_tol times the matching original-row norm are dropped,
    and each elimination column keeps at most fill_cap stored entries across
    its L and U parts (pivot and unit diagonal always kept). row_norms is
    indexed by original row and required when drop_tol > 0.

    Returns (Lp, Li, Lx, Up, Ui, Ux, pinv, fail_col). fail_col < 0 on
    success, otherwise the elimination step with no usable pivot. L/U row
    indices are pivotal; L columns store the unit diagonal first, U columns
    store the pivot last with the other rows ascending.
    """
    cap0 = max(4 * len(Ax), 2 * n, 16)
    Lp = np.zeros(n + 1, dtype=np.int64)
    Li = np.empty(cap0, dtype=np.int64)
    Lx = np.empty(cap0, dtype=np.complex128)
    Up = np.zeros(n + 1, dtype=np.int64)
    Ui = np.empty(cap0, dtype=np.int64)
    Ux = np.empty(cap0, dtype=np.complex128)
    lnnz = 0
    unnz = 0

    pinv = np.full(n, -1, dtype=np.int64)   # original row -> pivotal index
    prow = np.full(n, -1, dtype=np.int64)   # pivotal index -> original row
    x = np.zeros(n, dtype=np.complex128)
    flag = np.full(n, -1, dtype=np.int64)
    pattern = np.empty(n, dtype=np.int64)

    for k in range(n):
        j = int(q[k]) if q is not None else k

        # Scatter column j and seed the update heap.
        npat = 0
        heap = []
        for p in range(Ap[j], Ap[j + 1]):
            i = int(Ai[p])
            x[i] = Ax[p]
            flag[i] = k
            pattern[npat] = i
            npat += 1
            if pinv[i] >= 0:
                heapq.heappush(heap, int(pinv[i]))

        # Left-looking updates in increasing pivotal order. Expansion from
        # pivotal column c reaches only rows pivoted after c, so the heap
        # never yields an index below the one just processed.
        urows = []
        uvals = []
        while heap:
            c = heapq.heappop(heap)
            ip = int(prow[c])
            xc = x[ip]
            urows.append(c)
            uvals.append(xc)
            p0 = Lp[c] + 1
            p1 = Lp[c + 1]
            if p0 == p1:
                continue
            rows = Li[p0:p1]
            isnew = flag[rows] != k
            if isnew.any():
                new = rows[isnew]
                flag[new] = k
                x[new] = 0.0
                pattern[npat: npat + len(new)] = new
                npat += len(new)
                for c2 in pinv[new]:
                    if c2 >= 0:
                        heapq.heappush(heap, int(c2))
            x[rows] -= _cmul(Lx[p0:p1], xc)

        # Pivot: largest |re|+|im| among rows not yet pivotal, ties to the
        # lowest original row index.
        best_mag = -1.0
        ipiv = -1
        lrows = []
        for t in range(npat):
            i = int(pattern[t])
            if pinv[i] >= 0:
                continue
            lrows.append(i)
            v = x[i]
            mag = abs(v.real) + abs(v.imag)
            if mag > best_mag or (mag == best_mag and i < ipiv):
                best_mag = mag
                ipiv = i
        if ipiv < 0 or best_mag == 0.0:
            return Lp, Li[:lnnz], Lx[:lnnz], Up, Ui[:unnz], Ux[:unnz], pinv, k
        piv = x[ipiv]

        keep_u = list(range(len(urows)))
        keep_l = [i for i in lrows if i != ipiv]
        if drop_tol > 0.0:
            keep_u = [
                t for t in keep_u
                if abs(uvals[t].real) + abs(uvals[t].imag)
                >= drop_tol * row_norms[prow[urows[t]]]
            ]
            keep_l = [
                i for i in keep_l
                if abs(x[i].real) + abs(x[i].imag) >= drop_tol * row_norms[i]
            ]
        if fill_cap >= 0 and len(keep_u) + len(keep_l) + 2 > fill_cap:
            allowed = max(fill_cap - 2, 0)
            ranked = sorted(
                [(-(abs(uvals[t].real) + abs(uvals[t].imag)), 0, urows[t], t)
                 for t in keep_u]
                + [(-(abs(x[i].real) + abs(x[i].imag)), 1, i, i)
                   for i in keep_l]
            )[:allowed]
            ku = {r[3] for r in ranked if r[1] == 0}
            kl = {r[3] for r in ranked if r[1] == 1}
            keep_u = [t for t in keep_u if t in ku]
            keep_l = [i for i in keep_l if i in kl]

        # Emit U column k: kept off-diagonal rows (already ascending), pivot
        # last. Emit L column k: unit diagonal first (original row indices,
        # remapped once the factorization completes), then kept rows scaled
        # by the pivot reciprocal.
        need_u = unnz + len(keep_u) + 1
        Ui, Ux = _grow(Ui, Ux, need_u)
        for t in keep_u:
            Ui[unnz] = urows[t]
            Ux[unnz] = uvals[t]
            unnz += 1
        Ui[unnz] = k
        Ux[unnz] = piv
        unnz += 1
        Up[k + 1] = unnz

        rp = _recip(piv)
        need_l = lnnz + len(keep_l) + 1
        Li, Lx = _grow(Li, Lx, need_l)
        Li[lnnz] = ipiv
        Lx[lnnz] = 1.0
        lnnz += 1
        for i in keep_l:
            Li[lnnz] = i
            Lx[lnnz] = x[i] * rp
            lnnz += 1
        Lp[k + 1] = lnnz

        pinv[ipiv] = k
        prow[k] = ipiv

    Li = Li[:lnnz].copy()
    Lx = Lx[:lnnz].copy()
    Ui = Ui[:unnz].copy()
    Ux = Ux[:unnz].copy()
    Li[:] = pinv[Li]  # remap L rows to pivotal indices
    return Lp, Li, Lx, Up, Ui, Ux, pinv, -1
