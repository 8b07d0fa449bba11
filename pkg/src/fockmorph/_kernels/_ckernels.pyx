# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; see ``_pykernels`` for the reference."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, lgamma, exp
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"


def count_table(int d, int n_max, bint fermion):
    cdef cnp.int64_t[:, :] table
    cdef int r, k
    out = np.zeros((n_max + 1, d + 1), dtype=np.int64)
    table = out
    for k in range(d + 1):
        table[0, k] = 1
    for k in range(1, d + 1):
        for r in range(1, n_max + 1):
            if fermion:
                table[r, k] = table[r, k - 1] + table[r - 1, k - 1]
            else:
                table[r, k] = table[r, k - 1] + table[r - 1, k]
    return out


cdef inline long _rank(cnp.int64_t* occ, int d, const cnp.int64_t[:] offsets,
                       const cnp.int64_t[:, :] table, bint fermion) nogil:
    cdef long total = 0, rank, rem, top, v
    cdef int i
    for i in range(d):
        total += occ[i]
    rank = offsets[total]
    rem = total
    for i in range(d - 1):
        top = 1 if fermion else rem
        if top > rem:
            top = rem
        v = occ[i] + 1
        while v <= top:
            rank += table[rem - v, d - i - 1]
            v += 1
        rem -= occ[i]
    return rank


def rank_state(occ, offsets, table, bint fermion):
    cdef cnp.int64_t[:] o = np.array(occ, dtype=np.int64)
    return _rank(&o[0], o.shape[0], offsets, table, fermion)


def ladder_entries(occ_in, offsets_in, table_in, bint fermion, int n_max):
    cdef const cnp.int64_t[:, :] occ = np.ascontiguousarray(occ_in, dtype=np.int64)
    cdef const cnp.int64_t[:] offsets = np.ascontiguousarray(offsets_in, dtype=np.int64)
    cdef const cnp.int64_t[:, :] table = np.ascontiguousarray(table_in, dtype=np.int64)
    cdef Py_ssize_t dim = occ.shape[0], d = occ.shape[1]
    cdef Py_ssize_t cap = dim * d, count = 0, col, j, m
    cdef long total, nj, parity
    mode_a = np.empty(cap, dtype=np.int64)
    row_a = np.empty(cap, dtype=np.int64)
    col_a = np.empty(cap, dtype=np.int64)
    val_a = np.empty(cap, dtype=np.float64)
    cdef cnp.int64_t[:] mode_v = mode_a, row_v = row_a, col_v = col_a
    cdef double[:] val_v = val_a
    cdef cnp.int64_t* work = <cnp.int64_t*> malloc(d * sizeof(cnp.int64_t))
    try:
        with nogil:
            for col in range(dim):
                total = 0
                for m in range(d):
                    total += occ[col, m]
                if total >= n_max:
                    continue
                parity = 0
                for j in range(d):
                    nj = occ[col, j]
                    if fermion and nj == 1:
                        parity += 1
                        continue
                    for m in range(d):
                        work[m] = occ[col, m]
                    work[j] = nj + 1
                    mode_v[count] = j
                    row_v[count] = _rank(work, d, offsets, table, fermion)
                    col_v[count] = col
                    if fermion:
                        val_v[count] = -1.0 if parity % 2 else 1.0
                    else:
                        val_v[count] = sqrt(nj + 1.0)
                    count += 1
    finally:
        free(work)
    return mode_a[:count], row_a[:count], col_a[:count], val_a[:count]


cdef double complex _permanent(const double complex* mat, int n, double complex* rowsum,
                               int* delta) nogil:
    # Glynn formula with Gray-code updates; mat is row-major n x n
    cdef long total, k, gray, prev, diff
    cdef int i, j, sign, flip
    cdef double complex acc = 0, prod
    if n == 0:
        return 1.0
    for j in range(n):
        rowsum[j] = 0
        for i in range(n):
            rowsum[j] = rowsum[j] + mat[i * n + j]
    for i in range(n):
        delta[i] = 1
    sign = 1
    total = 1 << (n - 1)
    prev = 0
    for k in range(total):
        prod = 1
        for j in range(n):
            prod = prod * rowsum[j]
        acc = acc + sign * prod
        if k + 1 == total:
            break
        gray = (k + 1) ^ ((k + 1) >> 1)
        diff = gray ^ prev
        flip = 0
        while (diff >> flip) != 1:
            flip += 1
        # gray bit b toggles row b + 1; row 0 keeps delta = +1
        flip += 1
        delta[flip] = -delta[flip]
        for j in range(n):
            rowsum[j] = rowsum[j] + 2 * delta[flip] * mat[flip * n + j]
        sign = -sign
        prev = gray
    return acc / total


def permanent(mat_in):
    cdef const double complex[:, ::1] mat = np.ascontiguousarray(mat_in, dtype=np.complex128)
    cdef int n = mat.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    cdef double complex* rowsum = <double complex*> malloc(n * sizeof(double complex))
    cdef int* delta = <int*> malloc(n * sizeof(int))
    cdef double complex res
    try:
        res = _permanent(&mat[0, 0], n, rowsum, delta)
    finally:
        free(rowsum)
        free(delta)
    return complex(res)


cdef double complex _det(double complex* m, int n) nogil:
    # Gaussian elimination with partial pivoting, in place
    cdef int i, j, k, piv
    cdef double best, mag
    cdef double complex det = 1, tmp, f
    for k in range(n):
        piv = k
        best = abs(m[k * n + k])
        for i in range(k + 1, n):
            mag = abs(m[i * n + k])
            if mag > best:
                best = mag
                piv = i
        if best == 0.0:
            return 0
        if piv != k:
            det = -det
            for j in range(n):
                tmp = m[k * n + j]
                m[k * n + j] = m[piv * n + j]
                m[piv * n + j] = tmp
        det = det * m[k * n + k]
        for i in range(k + 1, n):
            f = m[i * n + k] / m[k * n + k]
            for j in range(k, n):
                m[i * n + j] = m[i * n + j] - f * m[k * n + j]
    return det


def gamma_block(a_in, rows_in, cols_in, bint fermion):
    cdef const double complex[:, ::1] a = np.ascontiguousarray(a_in, dtype=np.complex128)
    cdef const cnp.int64_t[:, ::1] rows = np.ascontiguousarray(rows_in, dtype=np.int64)
    cdef const cnp.int64_t[:, ::1] cols = np.ascontiguousarray(cols_in, dtype=np.int64)
    cdef Py_ssize_t nr = rows.shape[0], nc = cols.shape[0], d = rows.shape[1]
    out_a = np.zeros((nr, nc), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_a
    if nr == 0 or nc == 0:
        return out_a
    cdef int n = 0
    cdef Py_ssize_t p, q, i, j, t
    for j in range(d):
        n += rows[0, j]
    if n == 0:
        out_a[:, :] = 1.0
        return out_a
    cdef int* ri = <int*> malloc(n * sizeof(int))
    cdef int* ci = <int*> malloc(n * sizeof(int))
    cdef int* delta = <int*> malloc(n * sizeof(int))
    cdef double complex* sub = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* rowsum = <double complex*> malloc(n * sizeof(double complex))
    cdef double* rnorm = <double*> malloc(nr * sizeof(double))
    cdef double* cnorm = <double*> malloc(nc * sizeof(double))
    cdef double lg
    try:
        with nogil:
            for p in range(nr):
                lg = 0
                for j in range(d):
                    lg += lgamma(rows[p, j] + 1.0)
                rnorm[p] = exp(0.5 * lg)
            for q in range(nc):
                lg = 0
                for j in range(d):
                    lg += lgamma(cols[q, j] + 1.0)
                cnorm[q] = exp(0.5 * lg)
            for p in range(nr):
                t = 0
                for j in range(d):
                    for i in range(rows[p, j]):
                        ri[t] = j
                        t += 1
                for q in range(nc):
                    t = 0
                    for j in range(d):
                        for i in range(cols[q, j]):
                            ci[t] = j
                            t += 1
                    for i in range(n):
                        for j in range(n):
                            sub[i * n + j] = a[ri[i], ci[j]]
                    if fermion:
                        out[p, q] = _det(sub, n)
                    else:
                        out[p, q] = _permanent(sub, n, rowsum, delta) / (rnorm[p] * cnorm[q])
    finally:
        free(ri)
        free(ci)
        free(delta)
        free(sub)
        free(rowsum)
        free(rnorm)
        free(cnorm)
    return out_a
