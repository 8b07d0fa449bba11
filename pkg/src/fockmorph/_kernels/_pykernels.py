"""Pure-Python/numpy versions of the hot loops.

Signatures mirror the compiled module ``_ckernels`` exactly so the two are
interchangeable.
"""
from __future__ import annotations

from math import factorial, sqrt

import numpy as np

BACKEND = "python"


def count_table(d: int, n_max: int, fermion: bool) -> np.ndarray:
    """Number of ways to put ``r`` particles into ``k`` modes, as ``table[r, k]``."""
    table = np.zeros((n_max + 1, d + 1), dtype=np.int64)
    table[0, :] = 1
    for k in range(1, d + 1):
        for r in range(1, n_max + 1):
            if fermion:
                table[r, k] = table[r, k - 1] + table[r - 1, k - 1]
            else:
                table[r, k] = table[r, k - 1] + table[r - 1, k]
    return table


def rank_state(occ, offsets, table, fermion: bool) -> int:
    """Index of an occupation vector in the sector-major enumeration."""
    d = len(occ)
    total = 0
    for v in occ:
        total += int(v)
    rank = int(offsets[total])
    rem = total
    for i in range(d - 1):
        k = d - i - 1
        top = 1 if fermion else rem
        if top > rem:
            top = rem
        for v in range(int(occ[i]) + 1, top + 1):
            rank += int(table[rem - v, k])
        rem -= int(occ[i])
    return rank


def ladder_entries(occ, offsets, table, fermion: bool, n_max: int):
    """Nonzero entries of every single-mode creation operator.

    Returns ``(mode, row, col, val)`` arrays: ``a*(e_mode)`` has value ``val``
    at ``(row, col)``. States already in the top sector are skipped, which is
    the truncation ``1_N a* 1_N``.
    """
    occ = np.asarray(occ, dtype=np.int64)
    dim, d = occ.shape
    modes, rows, cols, vals = [], [], [], []
    work = np.empty(d, dtype=np.int64)
    for col in range(dim):
        state = occ[col]
        total = int(state.sum())
        if total >= n_max:
            continue
        parity = 0
        for j in range(d):
            nj = int(state[j])
            if fermion and nj == 1:
                parity += 1
                continue
            work[:] = state
            work[j] = nj + 1
            row = rank_state(work, offsets, table, fermion)
            if fermion:
                val = -1.0 if parity % 2 else 1.0
            else:
                val = sqrt(nj + 1)
            modes.append(j)
            rows.append(row)
            cols.append(col)
            vals.append(val)
    return (
        np.asarray(modes, dtype=np.int64),
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=np.float64),
    )


def permanent(mat) -> complex:
    """Permanent by Glynn's formula, vectorized over the sign patterns."""
    mat = np.asarray(mat, dtype=np.complex128)
    n = mat.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(mat[0, 0])
    # deltas: first row fixed to +1
    k = np.arange(2 ** (n - 1))
    bits = (k[:, None] >> np.arange(n - 1)) & 1
    deltas = np.ones((k.size, n))
    deltas[:, 1:] = 1 - 2 * bits
    signs = np.prod(deltas, axis=1)
    rowsums = deltas @ mat
    return complex(np.sum(signs * np.prod(rowsums, axis=1)) / 2 ** (n - 1))


def _expand(occ_row) -> list[int]:
    out = []
    for j, nj in enumerate(occ_row):
        out.extend([j] * int(nj))
    return out


def gamma_block(a, rows_occ, cols_occ, fermion: bool) -> np.ndarray:
    """Matrix elements of the second quantization of ``a`` between two sets of
    equal-particle-number occupation states (orthonormal basis)."""
    a = np.asarray(a, dtype=np.complex128)
    rows_occ = np.asarray(rows_occ, dtype=np.int64)
    cols_occ = np.asarray(cols_occ, dtype=np.int64)
    out = np.zeros((rows_occ.shape[0], cols_occ.shape[0]), dtype=np.complex128)
    ridx = [_expand(r) for r in rows_occ]
    cidx = [_expand(c) for c in cols_occ]
    if fermion:
        for p, ri in enumerate(ridx):
            for q, ci in enumerate(cidx):
                out[p, q] = np.linalg.det(a[np.ix_(ri, ci)]) if ri else 1.0
        return out
    rnorm = [sqrt(np.prod([factorial(int(v)) for v in r])) for r in rows_occ]
    cnorm = [sqrt(np.prod([factorial(int(v)) for v in c])) for c in cols_occ]
    for p, ri in enumerate(ridx):
        for q, ci in enumerate(cidx):
            out[p, q] = permanent(a[np.ix_(ri, ci)]) / (rnorm[p] * cnorm[q])
    return out
