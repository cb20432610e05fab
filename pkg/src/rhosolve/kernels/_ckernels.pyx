# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled numerical kernels.

Mirrors the pure-Python backend operation for operation: magnitudes are
measured as |re| + |im|, column updates run in increasing pivotal order,
pivot ties break to the lowest original row index, and divisions go through
an explicit conjugate-reciprocal, so both backends produce bit-identical
factors. Complex products use the plain (ac - bd, ad + bc) formula, matching
the interpreter's arithmetic.
"""

import numpy as np

from libc.math cimport fabs
from libc.stdlib cimport free, malloc

BACKEND_NAME = "c"


cdef inline double cabs1(double complex z) noexcept:
    return fabs(z.real) + fabs(z.imag)


cdef inline double complex recipc(double complex z) noexcept:
    # conj(z) / |z|^2; never use the compiler's complex division
    cdef double d = 1.0 / (z.real * z.real + z.imag * z.imag)
    cdef double complex r
    r.real = z.real * d
    r.imag = -z.imag * d
    return r


def csr_matvec(long long nrows, long long[::1] row_ptr, long long[::1] col_idx,
               double complex[::1] values, double complex[::1] x):
    """y = A @ x for CSR arrays. Sequential per-row summation."""
    y_arr = np.zeros(nrows, dtype=np.complex128)
    cdef double complex[::1] y = y_arr
    cdef long long r, p, p0, p1
    cdef double complex s
    for r in range(nrows):
        p0 = row_ptr[r]
        p1 = row_ptr[r + 1]
        if p0 == p1:
            continue
        s = values[p0] * x[col_idx[p0]]
        for p in range(p0 + 1, p1):
            s = s + values[p] * x[col_idx[p]]
        y[r] = s
    return y_arr


def lower_solve(long long[::1] Lp, long long[::1] Li, double complex[::1] Lx,
                double complex[::1] y):
    """In-place forward solve L y' = y, unit lower triangular CSC.

    Row indices are pivotal; each column stores its unit diagonal first.
    """
    cdef long long n = Lp.shape[0] - 1
    cdef long long c, p, p0, p1
    cdef double complex xc
    for c in range(n):
        p0 = Lp[c] + 1  # skip unit diagonal
        p1 = Lp[c + 1]
        xc = y[c]
        for p in range(p0, p1):
            y[Li[p]] = y[Li[p]] - Lx[p] * xc


def upper_solve(long long[::1] Up, long long[::1] Ui, double complex[::1] Ux,
                double complex[::1] y):
    """In-place backward solve U y' = y, upper triangular CSC.

    Each column stores its pivot (diagonal) last.
    """
    cdef long long n = Up.shape[0] - 1
    cdef long long c, p, p0, p1
    cdef double complex xc
    for c in range(n - 1, -1, -1):
        p0 = Up[c]
        p1 = Up[c + 1] - 1  # last entry is the pivot
        xc = y[c] * recipc(Ux[p1])
        y[c] = xc
        for p in range(p0, p1):
            y[Ui[p]] = y[Ui[p]] - Ux[p] * xc


ctypedef struct Cand:
    double negmag
    long long dom
    long long idx
    long long tag


cdef int _cand_cmp(const void *pa, const void *pb) noexcept nogil:
    cdef const Cand *a = <const Cand *> pa
    cdef const Cand *b = <const Cand *> pb
    if a.negmag < b.negmag:
        return -1
    if a.negmag > b.negmag:
        return 1
    if a.dom != b.dom:
        return -1 if a.dom < b.dom else 1
    if a.idx != b.idx:
        return -1 if a.idx < b.idx else 1
    return 0


cdef extern from "stdlib.h":
    void qsort(void *base, size_t nmemb, size_t size,
               int (*compar)(const void *, const void *) noexcept nogil)


cdef inline void _heap_push(long long *heap, long long *hn, long long v) noexcept:
    cdef long long i = hn[0], parent
    heap[i] = v
    hn[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent


cdef inline long long _heap_pop(long long *heap, long long *hn) noexcept:
    cdef long long top = heap[0], i = 0, child, last
    hn[0] -= 1
    last = hn[0]
    heap[0] = heap[last]
    while True:
        child = 2 * i + 1
        if child >= last:
            break
        if child + 1 < last and heap[child + 1] < heap[child]:
            child += 1
        if heap[i] <= heap[child]:
            break
        heap[i], heap[child] = heap[child], heap[i]
        i = child
    return top


def factorize(long long n, long long[::1] Ap, long long[::1] Ai,
              double complex[::1] Ax, q_obj, double drop_tol,
              long long fill_cap, rn_obj):
    """Left-looking sparse LU with threshold partial pivoting and optional
    incomplete dropping. Same contract as the pure-Python backend."""
    cdef long long[::1] q = q_obj if q_obj is not None else None
    cdef double[::1] row_norms = rn_obj if rn_obj is not None else None
    cdef bint have_q = q_obj is not None

    cdef long long cap_l = max(4 * Ax.shape[0], 2 * n, 16)
    cdef long long cap_u = cap_l
    Lp_arr = np.zeros(n + 1, dtype=np.int64)
    Up_arr = np.zeros(n + 1, dtype=np.int64)
    Li_arr = np.empty(cap_l, dtype=np.int64)
    Lx_arr = np.empty(cap_l, dtype=np.complex128)
    Ui_arr = np.empty(cap_u, dtype=np.int64)
    Ux_arr = np.empty(cap_u, dtype=np.complex128)
    cdef long long[::1] Lp = Lp_arr
    cdef long long[::1] Up = Up_arr
    cdef long long[::1] Li = Li_arr
    cdef double complex[::1] Lx = Lx_arr
    cdef long long[::1] Ui = Ui_arr
    cdef double complex[::1] Ux = Ux_arr
    cdef long long lnnz = 0, unnz = 0

    pinv_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] pinv = pinv_arr
    prow_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] prow = prow_arr
    x_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] x = x_arr
    flag_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] flag = flag_arr
    pattern_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] pattern = pattern_arr

    heap_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef long long[::1] heap_v = heap_arr
    cdef long long *heap = &heap_v[0]
    cdef long long hn = 0

    urow_arr = np.empty(n, dtype=np.int64)
    uval_arr = np.empty(n, dtype=np.complex128)
    lrow_arr = np.empty(n, dtype=np.int64)
    ukeep_arr = np.empty(n, dtype=np.uint8)
    lkeep_arr = np.empty(n, dtype=np.uint8)
    cdef long long[::1] urow = urow_arr
    cdef double complex[::1] uval = uval_arr
    cdef long long[::1] lrow = lrow_arr
    cdef unsigned char[::1] ukeep = ukeep_arr
    cdef unsigned char[::1] lkeep = lkeep_arr

    cdef long long k, j, p, p0, p1, i, c, npat, t, unum, lnum
    cdef long long ipiv, kept_u, kept_l, allowed, ncand, need
    cdef double best_mag, mag
    cdef double complex xc, v, piv, rp, tmp
    cdef Cand *cand
    cdef bint fail = False
    cdef long long fail_col = -1

    for k in range(n):
        j = q[k] if have_q else k

        # Scatter column j and seed the update heap.
        npat = 0
        hn = 0
        for p in range(Ap[j], Ap[j + 1]):
            i = Ai[p]
            x[i] = Ax[p]
            flag[i] = k
            pattern[npat] = i
            npat += 1
            if pinv[i] >= 0:
                _heap_push(heap, &hn, pinv[i])

        # Left-looking updates in increasing pivotal order. Expansion from
        # pivotal column c reaches only rows pivoted after c, so the heap
        # never yields an index below the one just processed.
        unum = 0
        while hn > 0:
            c = _heap_pop(heap, &hn)
            xc = x[prow[c]]
            urow[unum] = c
            uval[unum] = xc
            unum += 1
            p0 = Lp[c] + 1
            p1 = Lp[c + 1]
            if p0 == p1:
                continue
            for p in range(p0, p1):
                i = Li[p]
                if flag[i] != k:
                    flag[i] = k
                    x[i] = 0.0
                    pattern[npat] = i
                    npat += 1
                    if pinv[i] >= 0:
                        _heap_push(heap, &hn, pinv[i])
            for p in range(p0, p1):
                i = Li[p]
                x[i] = x[i] - Lx[p] * xc

        # Pivot: largest |re|+|im| among rows not yet pivotal, ties to the
        # lowest original row index.
        best_mag = -1.0
        ipiv = -1
        lnum = 0
        for t in range(npat):
            i = pattern[t]
            if pinv[i] >= 0:
                continue
            lrow[lnum] = i
            lnum += 1
            v = x[i]
            mag = fabs(v.real) + fabs(v.imag)
            if mag > best_mag or (mag == best_mag and i < ipiv):
                best_mag = mag
                ipiv = i
        if ipiv < 0 or best_mag == 0.0:
            fail = True
            fail_col = k
            break
        piv = x[ipiv]

        kept_u = 0
        for t in range(unum):
            if drop_tol > 0.0 and cabs1(uval[t]) < drop_tol * row_norms[prow[urow[t]]]:
                ukeep[t] = 0
            else:
                ukeep[t] = 1
                kept_u += 1
        kept_l = 0
        for t in range(lnum):
            i = lrow[t]
            if i == ipiv:
                lkeep[t] = 0
            elif drop_tol > 0.0 and cabs1(x[i]) < drop_tol * row_norms[i]:
                lkeep[t] = 0
            else:
                lkeep[t] = 1
                kept_l += 1

        if fill_cap >= 0 and kept_u + kept_l + 2 > fill_cap and kept_u + kept_l > 0:
            allowed = fill_cap - 2
            if allowed < 0:
                allowed = 0
            cand = <Cand *> malloc((kept_u + kept_l) * sizeof(Cand))
            if cand == NULL:
                raise MemoryError()
            ncand = 0
            for t in range(unum):
                if ukeep[t]:
                    cand[ncand].negmag = -cabs1(uval[t])
                    cand[ncand].dom = 0
                    cand[ncand].idx = urow[t]
                    cand[ncand].tag = t
                    ncand += 1
                    ukeep[t] = 0
            for t in range(lnum):
                if lkeep[t]:
                    cand[ncand].negmag = -cabs1(x[lrow[t]])
                    cand[ncand].dom = 1
                    cand[ncand].idx = lrow[t]
                    cand[ncand].tag = t
                    ncand += 1
                    lkeep[t] = 0
            qsort(cand, ncand, sizeof(Cand), _cand_cmp)
            if allowed > ncand:
                allowed = ncand
            kept_u = 0
            kept_l = 0
            for t in range(allowed):
                if cand[t].dom == 0:
                    ukeep[cand[t].tag] = 1
                    kept_u += 1
                else:
                    lkeep[cand[t].tag] = 1
                    kept_l += 1
            free(cand)

        # Emit U column k: kept off-diagonal rows (already ascending), pivot
        # last. Emit L column k: unit diagonal first (original row indices,
        # remapped once the factorization completes), then kept rows scaled
        # by the pivot reciprocal.
        need = unnz + kept_u + 1
        if need > cap_u:
            cap_u = max(2 * cap_u, need)
            Ui_new = np.empty(cap_u, dtype=np.int64)
            Ux_new = np.empty(cap_u, dtype=np.complex128)
            Ui_new[:unnz] = Ui_arr[:unnz]
            Ux_new[:unnz] = Ux_arr[:unnz]
            Ui_arr = Ui_new
            Ux_arr = Ux_new
            Ui = Ui_arr
            Ux = Ux_arr
        for t in range(unum):
            if ukeep[t]:
                Ui[unnz] = urow[t]
                Ux[unnz] = uval[t]
                unnz += 1
        Ui[unnz] = k
        Ux[unnz] = piv
        unnz += 1
        Up[k + 1] = unnz

        rp = recipc(piv)
        need = lnnz + kept_l + 1
        if need > cap_l:
            cap_l = max(2 * cap_l, need)
            Li_new = np.empty(cap_l, dtype=np.int64)
            Lx_new = np.empty(cap_l, dtype=np.complex128)
            Li_new[:lnnz] = Li_arr[:lnnz]
            Lx_new[:lnnz] = Lx_arr[:lnnz]
            Li_arr = Li_new
            Lx_arr = Lx_new
            Li = Li_arr
            Lx = Lx_arr
        Li[lnnz] = ipiv
        Lx[lnnz] = 1.0
        lnnz += 1
        for t in range(lnum):
            if lkeep[t]:
                i = lrow[t]
                Li[lnnz] = i
                Lx[lnnz] = x[i] * rp
                lnnz += 1
        Lp[k + 1] = lnnz

        pinv[ipiv] = k
        prow[k] = ipiv

    Li_out = Li_arr[:lnnz].copy()
    Lx_out = Lx_arr[:lnnz].copy()
    Ui_out = Ui_arr[:unnz].copy()
    Ux_out = Ux_arr[:unnz].copy()
    if fail:
        return (Lp_arr, Li_out, Lx_out, Up_arr, Ui_out, Ux_out, pinv_arr,
                fail_col)
    cdef long long[::1] Li_fin = Li_out
    for t in range(lnnz):
        Li_fin[t] = pinv[Li_fin[t]]  # remap L rows to pivotal indices
    return Lp_arr, Li_out, Lx_out, Up_arr, Ui_out, Ux_out, pinv_arr, -1
