"""Independent oracles built from explicit (anti)symmetric tensors."""
import itertools
from math import factorial, sqrt

import numpy as np


def perm_sign(perm):
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sym_projector(d, n, fermion):
    """Orthogonal projector onto the (anti)symmetric subspace of (C^d)^{⊗n}."""
    dim = d ** n
    p = np.zeros((dim, dim))
    idx = np.arange(dim).reshape((d,) * n) if n else np.zeros(())
    for perm in itertools.permutations(range(n)):
        perm_idx = np.transpose(idx, perm).reshape(-1) if n else np.array([0])
        m = np.zeros((dim, dim))
        m[np.arange(dim), perm_idx] = 1.0
        p += (perm_sign(perm) if fermion else 1) * m
    return p / factorial(n)


def occupation_tensor(occ, fermion):
    """Normalized tensor of the occupation state ``occ``."""
    d = len(occ)
    modes = [j for j, k in enumerate(occ) for _ in range(int(k))]
    n = len(modes)
    t = np.zeros(d ** n, dtype=complex)
    for perm in itertools.permutations(range(n)):
        flat = 0
        for p in perm:
            flat = flat * d + modes[p]
        t[flat] += perm_sign(perm) if fermion else 1
    nrm = np.linalg.norm(t)
    return t / nrm


def sector_isometry(basis, n):
    occ = basis.occupations[basis.sector_slice(n)]
    cols = [occupation_tensor(r, basis.is_fermionic) for r in occ]
    if not cols:
        return np.zeros((basis.d ** n, 0), dtype=complex)
    return np.stack(cols, axis=1)


def creation_oracle(basis, u):
    """a*(u) from sqrt(n+1) P_{n+1} (u ⊗ ψ) on explicit tensors."""
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    fermion = basis.is_fermionic
    for n in range(basis.n_max):
        src, dst = basis.sector_slice(n), basis.sector_slice(n + 1)
        i_n, i_n1 = sector_isometry(basis, n), sector_isometry(basis, n + 1)
        if i_n1.shape[1] == 0:
            continue
        p = sym_projector(basis.d, n + 1, fermion)
        block = sqrt(n + 1) * i_n1.conj().T @ p @ np.kron(u.reshape(-1, 1), i_n)
        out[dst, src] = block
    return out


def gamma_oracle(basis, a):
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for n in range(basis.n_max + 1):
        s = basis.sector_slice(n)
        iso = sector_isometry(basis, n)
        big = np.ones((1, 1), dtype=complex)
        for _ in range(n):
            big = np.kron(big, a)
        out[s, s] = iso.conj().T @ big @ iso
    return out


def dgamma_oracle(basis, h):
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    d = basis.d
    for n in range(basis.n_max + 1):
        s = basis.sector_slice(n)
        iso = sector_isometry(basis, n)
        big = np.zeros((d ** n, d ** n), dtype=complex)
        for k in range(n):
            big += np.kron(np.kron(np.eye(d ** k), h), np.eye(d ** (n - k - 1)))
        out[s, s] = iso.conj().T @ big @ iso
    return out
