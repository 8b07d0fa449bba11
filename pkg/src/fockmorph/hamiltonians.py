"""Declarative field Hamiltonians at finite particle cutoff.

``H_N = dΓ_N(h) + V_N``. Polynomial interactions are the exact compression
``1_N p(φ) 1_N``: the polynomial is evaluated on a basis with enough extra
room for every field factor and then cut back to ``N`` particles. Weyl
interactions use ``exp(iφ_N(u))`` of the truncated field.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from math import comb
from typing import Sequence, Union

import numpy as np

from . import operators as ops
from .fock_core import FockBasis, Statistics, build_basis
from .fockop import FockOperator, _herm_ok, as_matrix, as_vector, expm_h, hermitian_defect


@dataclass(frozen=True, eq=False)
class PolynomialField:
    """``Σ_t c_t φ(u_{t,1}) ... φ(u_{t,k_t})``."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(
            (complex(c), tuple(as_vector(u) for u in factors)) for c, factors in self.terms))

    @property
    def degree(self) -> int:
        return max((len(f) for _, f in self.terms), default=0)

    def mode_support(self) -> set[int]:
        return {int(j) for _, fs in self.terms for u in fs for j in np.nonzero(u)[0]}

    def padded(self, d: int) -> "PolynomialField":
        return PolynomialField(tuple((c, tuple(_pad(u, d) for u in fs)) for c, fs in self.terms))

    def has_odd_terms(self) -> bool:
        return any(len(fs) % 2 for c, fs in self.terms if c != 0)


@dataclass(frozen=True, eq=False)
class WeylSum:
    """``Σ_j c_j W(u_j)``, an atomic stand-in for ``W(f)``."""

    atoms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple((complex(c), as_vector(u)) for c, u in self.atoms))

    def mode_support(self) -> set[int]:
        return {int(j) for _, u in self.atoms for j in np.nonzero(u)[0]}

    def padded(self, d: int) -> "WeylSum":
        return WeylSum(tuple((c, _pad(u, d)) for c, u in self.atoms))


Interaction = Union[PolynomialField, WeylSum]


def _pad(u: np.ndarray, d: int) -> np.ndarray:
    if u.shape[0] > d:
        if np.any(u[d:] != 0):
            raise ValueError(f"interaction vector reaches beyond {d} modes")
        return u[:d]
    out = np.zeros(d, dtype=np.complex128)
    out[: u.shape[0]] = u
    return out


@dataclass(frozen=True, eq=False)
class QfhSpec:
    statistics: Statistics
    d: int
    n_max: int
    h: np.ndarray
    interaction: Interaction = dc_field(default_factory=PolynomialField)
    mass: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics.parse(self.statistics))
        h = as_matrix(self.h, self.d).copy()
        if not _herm_ok(h):
            raise ValueError(f"one-particle h is not Hermitian (defect {hermitian_defect(h):.3e})")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        if self.mass is not None:
            if not self.mass > 0:
                raise ValueError("mass check needs m > 0")
            low = float(np.linalg.eigvalsh(h).min())
            if low < self.mass - 1e-12:
                raise ValueError(f"mass check failed: min eig(h) = {low:.6g} < m = {self.mass:.6g}")

    @property
    def basis(self) -> FockBasis:
        return build_basis(self.d, self.n_max, self.statistics)


def _poly_matrix(poly: PolynomialField, d: int, n_max: int, statistics: Statistics) -> np.ndarray:
    extra = poly.degree
    big_n = n_max + extra
    if statistics is Statistics.FERMION:
        big_n = min(big_n, d)
    big = build_basis(d, big_n, statistics)
    small = build_basis(d, n_max, statistics)
    fields: dict[int, np.ndarray] = {}
    total = np.zeros((big.dim, big.dim), dtype=np.complex128)
    for c, factors in poly.terms:
        m = np.eye(big.dim, dtype=np.complex128)
        for u in factors:
            key = id(u)
            if key not in fields:
                fields[key] = ops.field(big, _pad(u, d)).matrix
            m = m @ fields[key]
        total += c * m
    idx = big.sub_basis_embedding(small)
    return total[np.ix_(idx, idx)]


def interaction_matrix(interaction: Interaction, basis: FockBasis) -> np.ndarray:
    if isinstance(interaction, PolynomialField):
        return _poly_matrix(interaction, basis.d, basis.n_max, basis.statistics)
    if isinstance(interaction, WeylSum):
        if basis.is_fermionic:
            raise ValueError("Weyl interactions need a bosonic basis")
        out = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
        for c, u in interaction.atoms:
            out += c * ops.weyl(basis, _pad(u, basis.d)).matrix
        return out
    raise TypeError(f"unknown interaction {interaction!r}")


def build_interaction(spec: QfhSpec) -> FockOperator:
    m = interaction_matrix(spec.interaction, spec.basis)
    if not _herm_ok(m, 1e-10):
        raise ValueError(f"interaction is not Hermitian (defect {hermitian_defect(m):.3e})")
    return FockOperator(spec.basis, 0.5 * (m + m.conj().T))


def build_qfh(spec: QfhSpec) -> FockOperator:
    """``H_N = dΓ_N(h) + V_N``."""
    basis = spec.basis
    v = build_interaction(spec)
    return FockOperator(basis, ops.dgamma(basis, spec.h).matrix + v.matrix)


def descend(spec: QfhSpec, k: int = 1) -> QfhSpec:
    """The same model at cutoff ``N - k``."""
    if spec.n_max - k < 0:
        raise ValueError(f"cannot descend {k} levels from cutoff {spec.n_max}")
    return replace(spec, n_max=spec.n_max - k)


def descent_chain(spec: QfhSpec) -> list[QfhSpec]:
    """``[spec at N, N-1, ..., 0]``."""
    return [descend(spec, k) for k in range(spec.n_max + 1)]


def vacuum_energy(spec: QfhSpec) -> float:
    """``c`` in ``H_0 = c ω``."""
    return float(build_qfh(descend(spec, spec.n_max)).matrix[0, 0].real)


def with_probe(spec: QfhSpec, lam_e: float) -> QfhSpec:
    """Append a decoupled probe mode with ``h e = λ_e e``."""
    h = np.zeros((spec.d + 1, spec.d + 1), dtype=np.complex128)
    h[: spec.d, : spec.d] = spec.h
    h[spec.d, spec.d] = lam_e
    return replace(spec, d=spec.d + 1, h=h, interaction=spec.interaction.padded(spec.d + 1), mass=None)


def probe_decoupled(spec: QfhSpec, probe: int | None = None) -> bool:
    probe = spec.d - 1 if probe is None else probe
    h = spec.h
    off = np.r_[h[probe, :probe], h[probe, probe + 1:], h[:probe, probe], h[probe + 1:, probe]]
    return not np.any(off != 0) and probe not in spec.interaction.mode_support()


# -- coupled system ------------------------------------------------------


def symmetrizer(p: int, q: int, d: int) -> np.ndarray:
    """Bosonic ``S_{p,q}``; its norm is ``C(p+q, p)^{1/2}``."""
    return ops.symmetrizer(p, q, d, Statistics.BOSON)


def symmetrizer_norm_expected(p: int, q: int) -> float:
    return float(np.sqrt(comb(p + q, p)))


def coupling_tensor(v: np.ndarray, d: int, ell: int) -> np.ndarray:
    """``K[j] = v[(j, ·), ·]`` as an array of shape ``(d, ell, ell)``."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (d * ell, ell):
        raise ValueError(f"coupling has shape {v.shape}, expected {(d * ell, ell)}")
    return v.reshape(d, ell, ell)


def coupled_creation(basis: FockBasis, ell: int, v) -> FockOperator:
    """``a*(v) = Σ_j a*(e_j) ⊗ K_j`` on ``Γ_N(H) ⊗ L``, index ``i * ell + α``."""
    k = coupling_tensor(v, basis.d, ell)
    out = np.zeros((basis.dim * ell, basis.dim * ell), dtype=np.complex128)
    for j, lad in enumerate(basis.ladder()):
        if np.any(k[j] != 0):
            out += np.kron(lad.toarray(), k[j])
    return FockOperator(basis, out, ell=ell)


def coupled_field(basis: FockBasis, ell: int, v) -> FockOperator:
    c = coupled_creation(basis, ell, v)
    return FockOperator(basis, c.matrix + c.matrix.conj().T, ell=ell)


@dataclass(frozen=True, eq=False)
class PauliFierzSpec:
    d: int
    n_max: int
    h: np.ndarray
    ell: int
    L: np.ndarray
    v: np.ndarray
    mass: float | None = None

    def __post_init__(self):
        h = as_matrix(self.h, self.d).copy()
        L = as_matrix(self.L, self.ell).copy()
        for name, m in (("h", h), ("L", L)):
            if not _herm_ok(m):
                raise ValueError(f"{name} is not Hermitian (defect {hermitian_defect(m):.3e})")
        if float(np.linalg.eigvalsh(L).min()) < -1e-12:
            raise ValueError("small-system operator L must be positive")
        lo = float(np.linalg.eigvalsh(h).min())
        if lo <= 0:
            raise ValueError(f"one-particle h must be strictly positive, min eig {lo:.6g}")
        if self.mass is not None and lo < self.mass - 1e-12:
            raise ValueError(f"mass check failed: min eig(h) = {lo:.6g} < m = {self.mass:.6g}")
        v = np.array(self.v, dtype=np.complex128)
        coupling_tensor(v, self.d, self.ell)
        for m in (h, L, v):
            m.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "v", v)

    @property
    def basis(self) -> FockBasis:
        return build_basis(self.d, self.n_max, Statistics.BOSON)


def pf_free(spec: PauliFierzSpec) -> FockOperator:
    """``H_0 = dΓ(h) ⊗ 1 + 1 ⊗ L``."""
    b = spec.basis
    m = np.kron(ops.dgamma(b, spec.h).matrix, np.eye(spec.ell)) + np.kron(np.eye(b.dim), spec.L)
    return FockOperator(b, m, ell=spec.ell)


def build_pauli_fierz(spec: PauliFierzSpec) -> FockOperator:
    h0 = pf_free(spec)
    phi = coupled_field(spec.basis, spec.ell, spec.v)
    return FockOperator(spec.basis, h0.matrix + phi.matrix, ell=spec.ell, hermitian=True)


def _inv_sqrt_psd(m: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (u * (1.0 / np.sqrt(w))[None, :]) @ u.conj().T


def weighted_coupling_norm(spec: PauliFierzSpec, r: float) -> float:
    """``K(v, r) = ‖(h^{-1/2} ⊗ 1) v (L + r)^{-1/2}‖``."""
    hm = np.kron(_inv_sqrt_psd(spec.h), np.eye(spec.ell))
    lm = _inv_sqrt_psd(spec.L + r * np.eye(spec.ell))
    return float(np.linalg.norm(hm @ spec.v @ lm, 2))


def form_bound_constant(spec: PauliFierzSpec, r: float) -> float:
    """The stated constant ``C(v, r) = K(v, r)^2``."""
    return weighted_coupling_norm(spec, r) ** 2


def form_bound_corrected_constant(spec: PauliFierzSpec, r: float) -> float:
    """``K(v, r)`` itself, which bounds the form for every ``f`` and scales like ``v``."""
    return weighted_coupling_norm(spec, r)


def form_bound_best_constant(spec: PauliFierzSpec, r: float) -> float:
    """``sup_f |⟨f|φ(v)f⟩| / ⟨f|(H_0 + r)f⟩`` on the truncated space."""
    h0 = pf_free(spec).matrix
    phi = coupled_field(spec.basis, spec.ell, spec.v).matrix
    s = _inv_sqrt_psd(h0 + r * np.eye(h0.shape[0]))
    return float(np.max(np.abs(np.linalg.eigvalsh(s @ phi @ s))))


@dataclass(frozen=True)
class FormBoundReport:
    r: float
    constant: float
    corrected_constant: float
    best_constant: float
    worst_sample_ratio: float
    samples: int
    holds_on_samples: bool


def form_bound_check(spec: PauliFierzSpec, rs: Sequence[float], rng: np.random.Generator,
                     samples: int = 200) -> list[FormBoundReport]:
    """Test ``|⟨f|φ(v)f⟩| ≤ C(v, r)⟨f|(H_0 + r)f⟩`` on random vectors ``f``."""
    h0 = pf_free(spec).matrix
    phi = coupled_field(spec.basis, spec.ell, spec.v).matrix
    dim = h0.shape[0]
    f = rng.standard_normal((dim, samples)) + 1j * rng.standard_normal((dim, samples))
    lhs = np.abs(np.einsum("is,is->s", f.conj(), phi @ f))
    h0f = np.einsum("is,is->s", f.conj(), h0 @ f).real
    nf = np.einsum("is,is->s", f.conj(), f).real
    out = []
    for r in rs:
        c = form_bound_constant(spec, r)
        ratio = lhs / (h0f + r * nf)
        out.append(FormBoundReport(
            r=float(r), constant=c, corrected_constant=form_bound_corrected_constant(spec, r),
            best_constant=form_bound_best_constant(spec, r), worst_sample_ratio=float(ratio.max()),
            samples=samples, holds_on_samples=bool(np.all(lhs <= c * (h0f + r * nf) * (1 + 1e-12)))))
    return out


# -- dynamics ------------------------------------------------------------


@dataclass(frozen=True)
class TrotterReport:
    t: float
    schedule: tuple
    errors: tuple
    ratios: tuple


def trotter_check(h0: FockOperator, v: FockOperator, t: float, schedule: Sequence[int]) -> TrotterReport:
    """Operator-norm errors of ``[e^{-tV/n} e^{-tH0/n}]^n`` against ``e^{-t(H0+V)}``."""
    if not t > 0:
        raise ValueError("t must be positive")
    a, b = h0.matrix, v.matrix
    exact = expm_h(a + b, -t)
    errs = []
    for n in schedule:
        step = expm_h(b, -t / n) @ expm_h(a, -t / n)
        errs.append(float(np.linalg.norm(np.linalg.matrix_power(step, n) - exact, 2)))
    ratios = tuple(errs[i + 1] / errs[i] if errs[i] > 0 else 0.0 for i in range(len(errs) - 1))
    return TrotterReport(float(t), tuple(int(n) for n in schedule), tuple(errs), ratios)


@dataclass(frozen=True)
class ResolventReport:
    partial_sums: tuple
    exact: np.ndarray
    errors: tuple
    q: float
    tail_bounds: tuple


def resolvent_series(h0: FockOperator, v: FockOperator, z: complex, s: complex, k_max: int) -> ResolventReport:
    """Partial sums of ``Σ_n s^n R_0 (V R_0)^n`` with ``R_0 = (z - H_0)^{-1}``."""
    a, b = h0.matrix, v.matrix
    eye = np.eye(a.shape[0])
    ev = np.linalg.eigvalsh(a)
    if np.min(np.abs(ev - z)) < 1e-14:
        raise ValueError(f"z = {z} lies in the spectrum of H0")
    r0 = np.linalg.inv(z * eye - a)
    vr = b @ r0
    q = abs(s) * float(np.linalg.norm(vr, 2))
    if q >= 1:
        raise ValueError(f"series diverges: |s|·‖V R_0‖ = {q:.6g} >= 1")
    exact = np.linalg.inv(z * eye - a - s * b)
    sums, errs, bounds = [], [], []
    term = r0.copy()
    acc = np.zeros_like(r0)
    nr0 = float(np.linalg.norm(r0, 2))
    for k in range(k_max + 1):
        acc = acc + term
        sums.append(acc.copy())
        errs.append(float(np.linalg.norm(exact - acc, 2)))
        bounds.append(nr0 * q ** (k + 1) / (1 - q))
        term = s * term @ vr
    return ResolventReport(tuple(sums), exact, tuple(errs), q, tuple(bounds))

