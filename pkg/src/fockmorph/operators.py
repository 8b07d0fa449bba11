"""Second-quantized operators on a truncated Fock basis.

Every elementary operator is the compression ``1_N · Op · 1_N`` of the
untruncated one; products are products of these compressions. Scalar
products are antilinear in the first slot, so ``u -> a*(u)`` is linear and
``u -> a(u)`` antilinear, and ``φ(u) = a(u) + a*(u)`` is only real-linear
in ``u``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial, sqrt

import numpy as np

from . import _kernels
from .fock_core import FockBasis, Statistics, build_basis
from .fockop import FockOperator, as_matrix, as_vector, expm_h


def _creation_matrix(basis: FockBasis, u: np.ndarray) -> np.ndarray:
    out = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for j, mat in enumerate(basis.ladder()):
        if u[j] != 0:
            coo = mat.tocoo()
            out[coo.row, coo.col] += u[j] * coo.data
    return out


def creation(basis: FockBasis, u) -> FockOperator:
    """``a*(u)``, raising the particle number by one (zero out of the top sector)."""
    u = as_vector(u, basis.d)
    return FockOperator(basis, _creation_matrix(basis, u))


def annihilation(basis: FockBasis, u) -> FockOperator:
    """``a(u)``, the adjoint of :func:`creation`."""
    return creation(basis, u).H


def field(basis: FockBasis, u) -> FockOperator:
    u = as_vector(u, basis.d)
    c = _creation_matrix(basis, u)
    return FockOperator(basis, c + c.conj().T)


def momentum(basis: FockBasis, u) -> FockOperator:
    """``π(u) = φ(iu) = i(a*(u) - a(u))``."""
    return field(basis, 1j * as_vector(u, basis.d))


def number_operator(basis: FockBasis) -> FockOperator:
    return FockOperator(basis, np.diag(basis.particle_numbers.astype(np.complex128)))


def sample_number_function(theta, n_max: int) -> np.ndarray:
    """Values ``θ(0..n_max)`` from a callable or a sample list (zero past its end)."""
    if callable(theta):
        return np.array([theta(n) for n in range(n_max + 1)], dtype=np.complex128)
    vals = np.zeros(n_max + 1, dtype=np.complex128)
    theta = np.asarray(theta, dtype=np.complex128).reshape(-1)
    k = min(theta.size, n_max + 1)
    vals[:k] = theta[:k]
    return vals


def number_function(basis: FockBasis, theta) -> FockOperator:
    """``θ(N) = Σ_n θ(n) 1^n``."""
    vals = sample_number_function(theta, basis.n_max)
    return FockOperator(basis, np.diag(vals[basis.particle_numbers]))


def gamma(basis: FockBasis, a) -> FockOperator:
    """Second quantization ``Γ(A)``: ``A^{∨n}`` (or ``A^{∧n}``) on each sector."""
    a = as_matrix(a, basis.d)
    out = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    occ = basis.occupations
    for n in range(basis.n_max + 1):
        s = basis.sector_slice(n)
        out[s, s] = _kernels.gamma_block(a, occ[s], occ[s], basis.is_fermionic)
    return FockOperator(basis, out)


def dgamma(basis: FockBasis, a) -> FockOperator:
    """``dΓ(A) = Σ_jk A_jk a*(e_j) a(e_k)``."""
    a = as_matrix(a, basis.d)
    lad = basis.ladder()
    out = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for j in range(basis.d):
        for k in range(basis.d):
            if a[j, k] != 0:
                out += a[j, k] * (lad[j] @ lad[k].T).toarray()
    return FockOperator(basis, out)


def _multiset(row) -> list[int]:
    return [j for j, v in enumerate(row) for _ in range(int(v))]


def vee_product(basis: FockBasis, *ops) -> FockOperator:
    """``A_1 ∨ ... ∨ A_n`` on sector ``n = len(ops)``, zero elsewhere.

    For fermionic bases this is the wedge product ``A_1 ∧ ... ∧ A_n``.
    """
    n = len(ops)
    if n > basis.n_max:
        raise ValueError(f"product of {n} factors needs cutoff >= {n}, basis has {basis.n_max}")
    mats = [as_matrix(a, basis.d) for a in ops]
    s = basis.sector_slice(n)
    occ = basis.occupations[s]
    fermion = basis.is_fermionic
    out = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    if n == 0:
        out[0, 0] = 1.0
        return FockOperator(basis, out)
    perms = list(itertools.permutations(range(n)))
    signs = [_perm_sign(p) for p in perms]
    rows = [_multiset(r) for r in occ]
    norms = [sqrt(float(np.prod([factorial(int(v)) for v in r]))) for r in occ]
    block = np.zeros((len(rows), len(rows)), dtype=np.complex128)
    for p, ri in enumerate(rows):
        for q, ci in enumerate(rows):
            acc = 0.0
            for perm, sg in zip(perms, signs):
                m = np.array([[mats[i][ri[perm[i]], c] for c in ci] for i in range(n)])
                acc += sg * np.linalg.det(m) if fermion else _kernels.permanent(m)
            block[p, q] = acc / factorial(n) if fermion else acc / (factorial(n) * norms[p] * norms[q])
    out[s, s] = block
    return FockOperator(basis, out)


wedge_product = vee_product


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def weyl(basis: FockBasis, u) -> FockOperator:
    """``W(u) = exp(iφ(u))`` of the truncated field (bosons only)."""
    if basis.is_fermionic:
        raise ValueError("Weyl operators are defined for bosonic bases only")
    return FockOperator(basis, expm_h(field(basis, u).matrix, 1j))


def weyl_truncation_bound(n: int, n_max: int, norm: float, terms: int = 400) -> float:
    """Bound on ``‖(exp(iφ_N(u)) - W(u)) 1_n‖`` for a field of norm ``norm``.

    The two exponential series agree up to order ``n_max - n``; each higher
    term is bounded by ``(2‖u‖)^s sqrt((n+1)...(n+s)) / s!`` for the
    truncated and for the true field.
    """
    if n > n_max:
        raise ValueError("sector above cutoff")
    if norm == 0:
        return 0.0
    from math import exp, lgamma, log

    total = 0.0
    start = n_max - n + 1
    for s in range(start, start + terms):
        logt = s * log(2 * norm) + 0.5 * (lgamma(n + s + 1) - lgamma(n + 1)) - lgamma(s + 1)
        total += exp(logt)
    return 2.0 * total


def symmetric_tensor_isometry(basis: FockBasis, n: int) -> np.ndarray:
    """Columns: sector-``n`` basis states as normalized (anti)symmetric tensors in ``(C^d)^{⊗n}``."""
    s = basis.sector_slice(n)
    occ = basis.occupations[s]
    d = basis.d
    iso = np.zeros((d ** n, occ.shape[0]), dtype=np.complex128)
    for col, row in enumerate(occ):
        modes = _multiset(row)
        for perm in itertools.permutations(range(n)):
            word = [modes[p] for p in perm]
            flat = 0
            for w in word:
                flat = flat * d + w
            iso[flat, col] += _perm_sign(perm) if basis.is_fermionic else 1.0
        iso[:, col] /= np.linalg.norm(iso[:, col])
    return iso


@dataclass(frozen=True)
class TensorSplit:
    """Isometry identifying a cutoff Fock space with a subspace of ``Γ(K) ⊗ Γ(K⊥)``.

    ``U`` has shape ``(dim_K * dim_Kperp, dim)``; product-basis index is
    ``i_K * dim_Kperp + i_Kperp``.
    """

    basis: FockBasis
    modes_k: tuple[int, ...]
    modes_kperp: tuple[int, ...]
    basis_k: FockBasis
    basis_kperp: FockBasis
    U: np.ndarray

    @property
    def image_projector(self) -> np.ndarray:
        return self.U @ self.U.conj().T

    def conjugate(self, op) -> np.ndarray:
        """``U T U†`` for an operator on the original basis."""
        m = op.matrix if isinstance(op, FockOperator) else np.asarray(op)
        return self.U @ m @ self.U.conj().T

    def product(self, op_k, op_kperp) -> np.ndarray:
        """``P (T_K ⊗ T_K⊥) P`` with ``P`` the projector onto the image."""
        a = op_k.matrix if isinstance(op_k, FockOperator) else np.asarray(op_k)
        b = op_kperp.matrix if isinstance(op_kperp, FockOperator) else np.asarray(op_kperp)
        p = self.image_projector
        return p @ np.kron(a, b) @ p

    def restrict_k(self, u) -> np.ndarray:
        return as_vector(u, self.basis.d)[list(self.modes_k)]

    def restrict_kperp(self, u) -> np.ndarray:
        return as_vector(u, self.basis.d)[list(self.modes_kperp)]


def tensor_split(basis: FockBasis, modes_k) -> TensorSplit:
    """Factorize the basis along a partition of the modes into ``K`` and ``K⊥``."""
    modes_k = tuple(sorted(int(j) for j in modes_k))
    rest = tuple(j for j in range(basis.d) if j not in modes_k)
    if not modes_k or not rest or len(set(modes_k)) != len(modes_k) or \
            any(not 0 <= j < basis.d for j in modes_k):
        raise ValueError(f"invalid mode partition {modes_k} of {basis.d} modes")
    n_k = min(basis.n_max, len(modes_k)) if basis.is_fermionic else basis.n_max
    n_p = min(basis.n_max, len(rest)) if basis.is_fermionic else basis.n_max
    bk = build_basis(len(modes_k), n_k, basis.statistics)
    bp = build_basis(len(rest), n_p, basis.statistics)
    u = np.zeros((bk.dim * bp.dim, basis.dim), dtype=np.complex128)
    in_k = set(modes_k)
    for col, row in enumerate(basis.occupations):
        ik = bk.index(row[list(modes_k)])
        ip = bp.index(row[list(rest)])
        sign = 1.0
        if basis.is_fermionic:
            occupied = [j for j in range(basis.d) if row[j]]
            inversions = sum(1 for x, y in itertools.combinations(occupied, 2)
                             if x not in in_k and y in in_k)
            sign = -1.0 if inversions % 2 else 1.0
        u[ik * bp.dim + ip, col] = sign
    return TensorSplit(basis, modes_k, rest, bk, bp, u)


def parity(basis: FockBasis) -> FockOperator:
    """``(-1)^N``."""
    return FockOperator(basis, np.diag((-1.0) ** basis.particle_numbers).astype(np.complex128))


def grading(basis: FockBasis) -> FockOperator:
    """Unitary ``w = φ(e_1)φ(ie_1)...φ(e_d)φ(ie_d)`` implementing the fermionic grading."""
    if not basis.is_fermionic:
        raise ValueError("the grading implementer is defined for fermionic bases")
    if basis.n_max < basis.d:
        raise ValueError("grading needs the full fermionic space (n_max == d)")
    w = np.eye(basis.dim, dtype=np.complex128)
    for j in range(basis.d):
        e = np.zeros(basis.d, dtype=np.complex128)
        e[j] = 1.0
        w = w @ field(basis, e).matrix @ field(basis, 1j * e).matrix
    return FockOperator(basis, w)


def unit_vector(d: int, j: int) -> np.ndarray:
    e = np.zeros(d, dtype=np.complex128)
    e[j] = 1.0
    return e


def vacuum(basis: FockBasis) -> np.ndarray:
    v = np.zeros(basis.dim, dtype=np.complex128)
    v[0] = 1.0
    return v


def product_vector(basis: FockBasis, *vectors) -> np.ndarray:
    """The monomial ``u_1 u_2 ... u_n`` (unnormalized product) as a state vector."""
    psi = vacuum(basis)
    for u in reversed(vectors):
        psi = creation(basis, u).matrix @ psi
    return psi


def monomial_norm_factor(occupations) -> float:
    """``sqrt(Π n_i!)``, the norm of ``e_1^{n_1}...e_d^{n_d}`` for bosons."""
    return sqrt(float(np.prod([factorial(int(v)) for v in occupations])))


def symmetrizer(p: int, q: int, d: int, statistics=Statistics.BOSON) -> np.ndarray:
    """Matrix of ``S_{p,q}: H^{∨p} ⊗ H^{∨q} -> H^{∨(p+q)}``, ``u ⊗ v -> uv``.

    Columns are indexed ``i_p * dim_q + i_q`` over orthonormal sector bases.
    """
    statistics = Statistics.parse(statistics)
    big = build_basis(d, p + q, statistics)
    sp, sq, st = big.sector_slice(p), big.sector_slice(q), big.sector_slice(p + q)
    occ = big.occupations
    dim_p, dim_q = sp.stop - sp.start, sq.stop - sq.start
    out = np.zeros((st.stop - st.start, dim_p * dim_q), dtype=np.complex128)
    # uv = a*(u-factors) applied to v; build through creation matrices
    lad = big.ladder()
    for ip in range(dim_p):
        row_p = occ[sp.start + ip]
        modes = _multiset(row_p)
        norm_p = 1.0 if big.is_fermionic else monomial_norm_factor(row_p)
        for iq in range(dim_q):
            psi = np.zeros(big.dim, dtype=np.complex128)
            psi[sq.start + iq] = 1.0
            for j in reversed(modes):
                psi = lad[j] @ psi
            out[:, ip * dim_q + iq] = psi[st] / norm_p
    return out
