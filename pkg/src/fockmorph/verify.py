"""Seeded property suites behind ``fockmorph verify``.

Each suite returns ledger entries ``(suite, identity, defect, tolerance,
passed)``. A suite draws its random numbers from a stream derived from the
seed and the suite's position in :data:`SUITES`, so results do not depend
on which other suites run.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from math import comb, factorial, sqrt
from typing import Callable

import numpy as np

from . import hamiltonians as ham
from . import morphism as mor
from . import mourre as mo
from . import operators as ops
from . import spectral as sp
from .fock_core import ProjectorKind, Statistics, build_basis, sector_projector
from .fockop import FockOperator, defect


@dataclass(frozen=True)
class LedgerEntry:
    suite: str
    identity: str
    defect: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def to_dict(self) -> dict:
        return asdict(self)


def _entry(suite: str, identity: str, value: float, tol: float, relation: str = "<=") -> LedgerEntry:
    value = float(value)
    ok = {"<=": value <= tol, "<": value < tol, ">": value > tol}[relation]
    return LedgerEntry(suite, identity, value, float(tol), bool(ok), relation)


def random_vector(rng, d: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / sqrt(2 * d)


def random_matrix(rng, d: int, norm: float | None = None) -> np.ndarray:
    m = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / sqrt(2 * d)
    if norm is not None:
        m *= norm / np.linalg.norm(m, 2)
    return m


def random_hermitian(rng, d: int, scale: float = 1.0) -> np.ndarray:
    m = random_matrix(rng, d)
    return scale * (m + m.conj().T) / 2


# -- suites --------------------------------------------------------------


def suite_basis(rng) -> list[LedgerEntry]:
    s = "basis"
    out = []
    worst = 0
    for stats, d, n in ((Statistics.BOSON, 3, 4), (Statistics.FERMION, 5, 5), (Statistics.BOSON, 1, 3)):
        b = build_basis(d, n, stats)
        expect = [comb(k + d - 1, d - 1) if stats is Statistics.BOSON else comb(d, k) for k in range(n + 1)]
        worst = max(worst, sum(abs(x - y) for x, y in zip(b.sector_sizes, expect)))
        worst = max(worst, sum(b.index(st) != i for i, st in enumerate(b.states)))
    out.append(_entry(s, "sector sizes are binomial and indexing is a bijection", worst, 0))
    b = build_basis(3, 3, Statistics.BOSON)
    single = [sector_projector(b, n, ProjectorKind.SINGLE).matrix for n in range(4)]
    cum = [sector_projector(b, n, ProjectorKind.CUMULATIVE).matrix for n in range(4)]
    err = defect(sum(single), np.eye(b.dim))
    for n, m in itertools.product(range(4), repeat=2):
        err = max(err, defect(single[n] @ single[m], single[n] if n == m else 0 * single[n]))
        err = max(err, defect(cum[n] @ cum[m], cum[min(n, m)]))
    out.append(_entry(s, "sector projectors: orthogonal resolution of the identity", err, 0))
    return out


def suite_ccr(rng) -> list[LedgerEntry]:
    s = "ccr"
    b = build_basis(3, 6, Statistics.BOSON)
    p = sector_projector(b, 5, ProjectorKind.CUMULATIVE).matrix
    worst = worst_phi = worst_vac = 0.0
    for _ in range(50):
        u, v = random_vector(rng, 3, 2.0), random_vector(rng, 3, 2.0)
        a_u, c_v = ops.annihilation(b, u).matrix, ops.creation(b, v).matrix
        lhs = (a_u @ c_v - c_v @ a_u) @ p
        worst = max(worst, defect(lhs, np.vdot(u, v) * p))
        f_u, f_v = ops.field(b, u).matrix, ops.field(b, v).matrix
        p2 = sector_projector(b, 4, ProjectorKind.CUMULATIVE).matrix
        worst_phi = max(worst_phi, defect((f_u @ f_v - f_v @ f_u) @ p2, 2j * np.vdot(u, v).imag * p2))
        worst_vac = max(worst_vac, float(np.linalg.norm(a_u @ ops.vacuum(b))))
    out = [_entry(s, "[a(u), a*(v)] = <u|v> on particle number <= N-1", worst, 1e-10),
           _entry(s, "[phi(u), phi(v)] = 2i Im<u|v> on particle number <= N-2", worst_phi, 1e-10),
           _entry(s, "a(u) annihilates the vacuum", worst_vac, 0)]
    rel = 0.0
    for n in range(1, 6):
        u = random_vector(rng, 3, 1.5)
        psi = ops.vacuum(b)
        c = ops.creation(b, u).matrix
        for _ in range(n):
            psi = c @ psi
        expect = sqrt(factorial(n)) * np.linalg.norm(u) ** n
        rel = max(rel, abs(np.linalg.norm(psi) - expect) / expect)
    out.append(_entry(s, "||a*(u)^n vacuum|| = sqrt(n!) ||u||^n (relative)", rel, 1e-10))
    return out


def suite_car(rng) -> list[LedgerEntry]:
    s = "car"
    b = build_basis(5, 5, Statistics.FERMION)
    e1 = e2 = e3 = e4 = 0.0
    eye = np.eye(b.dim)
    for _ in range(50):
        u, v = random_vector(rng, 5, 2.0), random_vector(rng, 5, 2.0)
        a_u, a_v = ops.annihilation(b, u).matrix, ops.annihilation(b, v).matrix
        c_u, c_v = a_u.conj().T, a_v.conj().T
        e1 = max(e1, defect(a_u @ c_v + c_v @ a_u, np.vdot(u, v) * eye))
        e2 = max(e2, defect(a_u @ a_v + a_v @ a_u, 0 * eye))
        e3 = max(e3, defect(c_u @ c_v + c_v @ c_u, 0 * eye))
        f = ops.field(b, u).matrix
        e4 = max(e4, defect(f @ f, np.vdot(u, u).real * eye))
    return [_entry(s, "{a(u), a*(v)} = <u|v>", e1, 1e-12),
            _entry(s, "{a(u), a(v)} = 0", e2, 1e-12),
            _entry(s, "{a*(u), a*(v)} = 0", e3, 1e-12),
            _entry(s, "phi(u)^2 = ||u||^2", e4, 1e-12)]


def _brute_monomial(us, d: int, fermion: bool) -> np.ndarray:
    # unnormalized (anti)symmetrized tensor sum_sigma eps u_sigma(1) x ... x u_sigma(n)
    n = len(us)
    out = np.zeros(d ** n, dtype=np.complex128)
    for perm in itertools.permutations(range(n)):
        t = np.ones(1, dtype=np.complex128)
        for i in perm:
            t = np.kron(t, us[i])
        out += (ops._perm_sign(perm) if fermion else 1) * t
    return out / sqrt(factorial(n))


def suite_gram(rng) -> list[LedgerEntry]:
    s = "gram"
    from ._kernels import permanent

    worst_b = worst_f = worst_iso = 0.0
    d = 3
    for n in range(1, 6):
        for fermion in (False, True):
            if fermion and n > d:
                continue
            us = [random_vector(rng, d, 1.0) for _ in range(n)]
            vs = [random_vector(rng, d, 1.0) for _ in range(n)]
            g = np.array([[np.vdot(u, v) for v in vs] for u in us])
            brute = np.vdot(_brute_monomial(us, d, fermion), _brute_monomial(vs, d, fermion))
            formula = np.linalg.det(g) if fermion else permanent(g)
            err = abs(brute - formula)
            if fermion:
                worst_f = max(worst_f, err)
            else:
                worst_b = max(worst_b, err)
            # the Fock-space monomials reproduce the same Gram values
            b = build_basis(d, n, Statistics.FERMION if fermion else Statistics.BOSON)
            fock = np.vdot(ops.product_vector(b, *us), ops.product_vector(b, *vs))
            worst_iso = max(worst_iso, abs(fock - formula))
    return [_entry(s, "monomial scalar product = permanent of the Gram matrix", worst_b, 1e-9),
            _entry(s, "antisymmetric monomial scalar product = determinant", worst_f, 1e-9),
            _entry(s, "occupation-basis monomials match the Gram formula", worst_iso, 1e-9)]


def suite_functor(rng) -> list[LedgerEntry]:
    s = "functor"
    b = build_basis(3, 5, Statistics.BOSON)
    e1 = e2 = e3 = e4 = 0.0
    for _ in range(5):
        a, c = random_matrix(rng, 3, 1.0), random_matrix(rng, 3, 1.0)
        e1 = max(e1, defect(ops.gamma(b, a @ c), ops.gamma(b, a) @ ops.gamma(b, c)))
        h = random_hermitian(rng, 3)
        t = float(rng.uniform(-2, 2))
        w, v = np.linalg.eigh(h)
        e2 = max(e2, defect(ops.gamma(b, (v * np.exp(1j * t * w)) @ v.conj().T),
                            ops.dgamma(b, h).expm_hermitian(1j * t)))
        z = complex(rng.standard_normal(), rng.standard_normal())
        e3 = max(e3, defect(ops.number_function(b, lambda n: z ** n), ops.gamma(b, z)))
    e4 = max(defect(ops.gamma(b, 0), sector_projector(b, 0)), defect(ops.gamma(b, 1), np.eye(b.dim)))
    return [_entry(s, "Gamma(AB) = Gamma(A) Gamma(B)", e1, 1e-10),
            _entry(s, "Gamma(exp(itA)) = exp(it dGamma(A))", e2, 1e-10),
            _entry(s, "z^N = Gamma(z)", e3, 1e-10),
            _entry(s, "Gamma(0) = vacuum projector and Gamma(1) = 1", e4, 1e-12)]


def suite_tensor(rng) -> list[LedgerEntry]:
    s = "tensor"
    b = build_basis(4, 4, Statistics.BOSON)
    ts = ops.tensor_split(b, [0, 2])
    bk, bp = ts.basis_k, ts.basis_kperp
    e1 = defect(ts.conjugate(ops.number_operator(b)),
                ts.product(ops.number_operator(bk), np.eye(bp.dim)) + ts.product(np.eye(bk.dim), ops.number_operator(bp)))
    bb, cc = random_matrix(rng, 2, 0.9), random_matrix(rng, 2, 0.9)
    full = np.zeros((4, 4), dtype=np.complex128)
    full[np.ix_([0, 2], [0, 2])] = bb
    full[np.ix_([1, 3], [1, 3])] = cc
    e2 = defect(ts.conjugate(ops.gamma(b, full)), ts.product(ops.gamma(bk, bb), ops.gamma(bp, cc)))
    u = random_vector(rng, 4)
    uk = u.copy()
    uk[[1, 3]] = 0
    e3 = defect(ts.conjugate(ops.field(b, uk)), ts.product(ops.field(bk, ts.restrict_k(uk)), np.eye(bp.dim)))
    e4 = float(np.linalg.norm(ts.U.conj().T @ ts.U - np.eye(b.dim), 2))
    f = build_basis(4, 4, Statistics.FERMION)
    tf = ops.tensor_split(f, [0, 2])
    fk, fp = tf.basis_k, tf.basis_kperp
    u, v = random_vector(rng, 4), random_vector(rng, 4)
    u[[1, 3]] = 0
    v[[0, 2]] = 0
    lhs = tf.conjugate(ops.field(f, u + v))
    rhs = tf.product(ops.field(fk, tf.restrict_k(u)), np.eye(fp.dim)) + \
        tf.product(ops.parity(fk), ops.field(fp, tf.restrict_kperp(v)))
    e5 = defect(lhs, rhs)
    return [_entry(s, "N splits as N_K x 1 + 1 x N_Kperp", e1, 1e-10),
            _entry(s, "Gamma(B + C) = Gamma(B) x Gamma(C)", e2, 1e-10),
            _entry(s, "phi(u) = phi_K(u) x 1 for u in K", e3, 1e-10),
            _entry(s, "tensor split is an isometry", e4, 1e-12),
            _entry(s, "fermionic phi(u+v) = phi_K(u) x 1 + (-1)^N_K x phi_Kperp(v)", e5, 1e-10)]


def random_canonical_word(rng, d_support: int, fermion: bool) -> mor.Word:
    """A random canonical word over the first ``d_support`` modes; the next mode is the probe."""
    d = d_support + 1

    def vec():
        u = np.zeros(d, dtype=np.complex128)
        u[:d_support] = random_vector(rng, d_support, 1.2)
        return u

    def contraction():
        a = np.zeros((d, d), dtype=np.complex128)
        a[:d_support, :d_support] = random_matrix(rng, d_support, float(rng.uniform(0.2, 0.9)))
        a[d_support, d_support] = complex(rng.uniform(-0.9, 0.9), rng.uniform(-0.3, 0.3)) * 0.9
        return a

    factors: list = []
    kind = int(rng.integers(0, 3 if fermion else 4))
    if kind == 3:
        factors.append(mor.Weyl(vec()))
        factors.append(mor.NumberFunction(rng.standard_normal(int(rng.integers(2, 7)))))
        return mor.Word(tuple(factors))
    if kind == 2:
        return mor.Word((mor.Scalar(complex(rng.standard_normal(), 0.5)), mor.SectorProj(int(rng.integers(0, 5)))))
    for _ in range(int(rng.integers(1, 3))):
        factors.append(mor.FieldPower(vec(), int(rng.integers(0, 3))))
    if kind == 1 or rng.random() < 0.5:
        factors.append(mor.Gamma(contraction()))
    if rng.random() < 0.5:
        factors.append(mor.NumberFunction(rng.standard_normal(int(rng.integers(2, 7)))))
    return mor.Word(tuple(factors))


def morphism_exactness(rng, n_words: int = 100, fermion: bool = False, use_grading: bool | None = None) -> float:
    stats = Statistics.FERMION if fermion else Statistics.BOSON
    b = build_basis(4, 4, stats)
    worst = 0.0
    for _ in range(n_words):
        w = random_canonical_word(rng, 3, fermion)
        worst = max(worst, mor.morphism_exactness_defect(w, b, use_grading=use_grading))
    return worst


def odd_word_grading_defect(rng, n_words: int = 20) -> float:
    """Largest defect over odd fermionic words when the grading is skipped."""
    b = build_basis(4, 4, Statistics.FERMION)
    worst = 0.0
    for _ in range(n_words):
        u = np.zeros(4, dtype=np.complex128)
        u[:3] = random_vector(rng, 3, 1.0)
        w = mor.word(mor.FieldPower(u, 1))
        worst = max(worst, mor.morphism_exactness_defect(w, b, use_grading=False))
    return worst


def kernel_witness_defect(rng, trials: int = 10) -> float:
    worst = 0.0
    for stats in (Statistics.BOSON, Statistics.FERMION):
        b = build_basis(4, 4, stats)
        free = (b.occupations[:, -1] == 0).astype(float)
        for _ in range(trials):
            r = random_matrix(rng, b.dim) * free[:, None] * free[None, :]
            t = FockOperator(b, r)
            worst = max(worst, mor.numeric_morphism(t, b).norm())
    return worst


def suite_morphism(rng) -> list[LedgerEntry]:
    s = "morphism"
    e_b = morphism_exactness(rng, 100, False)
    e_f = morphism_exactness(rng, 100, True)
    e_ng = odd_word_grading_defect(rng)
    e_k = kernel_witness_defect(rng)
    b = build_basis(4, 5, Statistics.BOSON)
    e_sec = max(defect(mor.numeric_morphism(sector_projector(b, n), b),
                       sector_projector(mor.probe_free_basis(b, 3), n - 1)) for n in range(1, 5))
    e_mult = 0.0
    e_adj = 0.0
    b3 = build_basis(4, 5, Statistics.BOSON)
    for _ in range(10):
        w1 = mor.word(mor.FieldPower(np.r_[random_vector(rng, 3), 0], int(rng.integers(1, 3))))
        w2 = mor.word(mor.FieldPower(np.r_[random_vector(rng, 3), 0], int(rng.integers(1, 3))))
        t1, t2 = mor.evaluate(w1, b3), mor.evaluate(w2, b3)
        e_mult = max(e_mult, mor.morphism_multiplicativity_check(t1, t2))
        e_adj = max(e_adj, defect(mor.numeric_morphism(t1 @ t2).H, mor.numeric_morphism((t1 @ t2).H)))
    chain_ok = 0.0
    for n in range(0, 4):
        k = mor.decay_check(mor.word(mor.NumberFunction(np.ones(n + 1))))
        chain_ok = max(chain_ok, abs(k - (n + 1)))
    return [_entry(s, "probe conjugation equals the symbolic image (bosons)", e_b, 1e-10),
            _entry(s, "graded probe conjugation equals the symbolic image (fermions)", e_f, 1e-10),
            _entry(s, "odd fermionic words fail without the grading", e_ng, 1e-3, ">"),
            _entry(s, "probe-free finite-rank operators map to zero", e_k, 1e-12),
            _entry(s, "sector projector n maps to sector projector n-1", e_sec, 1e-12),
            _entry(s, "probe conjugation is multiplicative on field words", e_mult, 1e-10),
            _entry(s, "probe conjugation commutes with the adjoint", e_adj, 1e-12),
            _entry(s, "number function supported on 0..n dies after n+1 steps", chain_ok, 0)]


def cutoff_polynomial_spec() -> ham.QfhSpec:
    """Desk model: three field modes, quadratic plus linear field interaction."""
    u = np.array([0.35, 0.2 + 0.1j, -0.15])
    w = np.array([0.1, -0.25j, 0.3])
    inter = ham.PolynomialField(((1.0, (u, u)), (0.5, (w,)), (0.3, (u, w, w, u))))
    return ham.QfhSpec(Statistics.BOSON, 3, 3, np.diag([1.0, 1.4, 1.9]), inter, mass=1.0)


def suite_hvz(rng) -> list[LedgerEntry]:
    s = "hvz"
    spec = cutoff_polynomial_spec()
    worst = inv = 0.0
    for lam in (1.0, 1.4, 2.3):
        r = sp.morphism_spectrum_check(spec, lam)
        worst = max(worst, r.defect)
        inv = max(inv, r.invariance_defect)
    # the recursion result is the union of witness sets over a probe per eigenvalue of h
    rep = sp.hvz_essential_spectrum(spec)
    witness = None
    for lam in np.linalg.eigvalsh(spec.h):
        r = sp.morphism_spectrum_check(spec, float(lam))
        part = sp.SpectrumSet.from_values(r.restricted, 1e-9)
        witness = part if witness is None else witness.union(part)
    tol = 1e-9
    agree = 0.0 if rep.result.approx_equal(witness, tol) else 1.0
    free = ham.QfhSpec(Statistics.BOSON, 2, 3, np.diag([1.0, 2.0]))
    e_free = sp.morphism_spectrum_check(free, 1.5).defect
    return [_entry(s, "H_N on a*(e) Gamma_{N-1}(E) has spectrum lambda_e + sigma(H_{N-1})", worst, 1e-9),
            _entry(s, "a*(e) Gamma_{N-1}(E) is invariant under H_N", inv, 1e-12),
            _entry(s, "recursion sigma(h) + sigma(H_{N-1}) equals the witness union", agree, 0),
            _entry(s, "free field witness", e_free, 1e-12)]


def suite_ground(rng) -> list[LedgerEntry]:
    s = "ground"
    m = 0.7
    free = ham.QfhSpec(Statistics.BOSON, 3, 3, np.diag([m, 1.2, 2.0]), mass=m)
    ess = sp.hvz_essential_spectrum(free).result
    g = sp.ground_state_report(ham.build_qfh(free), ess, m)
    weak = weak_coupling_spec(m)
    gw = sp.ground_state_report(ham.build_qfh(weak), sp.hvz_essential_spectrum(weak).result, m)
    # at finite cutoff the gap exceeds m by E_{N-1} - E_N >= 0
    return [_entry(s, "free field: gap to essential spectrum = m", abs(g.gap - m), 1e-12),
            _entry(s, "weak coupling: gap > 0", gw.gap, 0, ">"),
            _entry(s, "weak coupling: gap - m <= cutoff tolerance", gw.gap - m, 1e-9)]


def weak_coupling_spec(m: float = 0.7, n_max: int = 4) -> ham.QfhSpec:
    u = 0.05 * np.array([1.0, 0.6j, 0.4])
    return ham.QfhSpec(Statistics.BOSON, 3, n_max, np.diag([m, 1.2, 2.0]),
                       ham.PolynomialField(((1.0, (u,)),)), mass=m)


def trotter_pair(rng):
    b = build_basis(3, 3, Statistics.BOSON)
    h0 = ops.dgamma(b, np.diag([1.0, 1.5, 2.2]))
    u = random_vector(rng, 3, 1.0)
    v = ops.field(b, u)
    return h0, v


def suite_trotter(rng) -> list[LedgerEntry]:
    s = "trotter"
    h0, v = trotter_pair(rng)
    rep = ham.trotter_check(h0, v, 1.0, [32, 64, 128, 256])
    worst = max(abs(r - 0.5) for r in rep.ratios)
    mono = float(all(rep.errors[i + 1] < rep.errors[i] for i in range(len(rep.errors) - 1)))
    zero = ham.trotter_check(h0, 0 * h0, 1.0, [1, 4]).errors
    return [_entry(s, "first-order product formula: |error(2n)/error(n) - 1/2| for n >= 32", worst, 0.1),
            _entry(s, "product formula errors decrease along the schedule", 1 - mono, 0),
            _entry(s, "V = 0 gives zero error", max(zero), 1e-12)]


def threshold_model(n: int = 3, m: float = 1.0) -> ham.QfhSpec:
    """Flat dispersion ``h = m`` on two interacting modes plus one free mode."""
    u = np.array([0.3, 0.25j, 0.0])
    return ham.QfhSpec(Statistics.BOSON, 3, n, m * np.eye(3), ham.PolynomialField(((1.0, (u, u)), (0.4, (u,)))))


def threshold_law(rng, n: int = 3, eps: float = 1e-3, step: float = 2.5e-4) -> dict:
    """Numeric thresholds of ``H_n`` against the cutoff formula from the descent chain."""
    spec = threshold_model(n)
    a = random_hermitian(rng, 3)
    tau = mo.one_particle_thresholds(spec.h, a, 0.05)
    hn = ham.build_qfh(spec)
    big_a = mo.conjugate_operator(spec.basis, a).A
    w = sp.eigvals(hn)
    grid = np.arange(w.min() - 0.05, w.max() + 0.05, step)
    num = mo.thresholds_numeric(mo.rho_profile(hn, big_a, grid, eps))
    levels = [sp.spectrum_of(ham.build_qfh(ham.descend(spec, n - j))) for j in range(n)]
    theo = mo.thresholds_cutoff(tau, levels, n)
    with_pp = theo.points.union(sp.spectrum_of(hn))
    tol = eps + step
    return {
        "tau_h": tau,
        "theory_in_numeric": all(num.points.contains(x, tol) for x in theo.points.points),
        "numeric_in_theory_pp": all(with_pp.contains(x, tol) for x in num.points.points),
        "tau_is_m": tau.approx_equal(sp.SpectrumSet.from_values([1.0]), 0.05),
        "theory": theo, "numeric": num,
    }


def tensor_rho_defect(rng) -> float:
    worst = 0.0
    for _ in range(3):
        h1, h2 = random_hermitian(rng, 3), random_hermitian(rng, 3)
        a1, a2 = random_hermitian(rng, 3), random_hermitian(rng, 3)
        w1, w2 = np.linalg.eigvalsh(h1), np.linalg.eigvalsh(h2)
        sums = (w1[:, None] + w2[None, :]).reshape(-1)
        gaps = np.diff(np.sort(np.r_[sums, w1, w2]))
        eps = max(1e-9, 0.25 * float(np.min(gaps[gaps > 1e-9])))
        worst = max(worst, mo.tensor_rho_check(h1, a1, h2, a2, None, eps).defect)
    return worst


def pauli_fierz_desk() -> tuple[ham.PauliFierzSpec, np.ndarray]:
    """Two field modes, two-level system at cutoff 2; returns the model and a conjugate ``a``."""
    v = np.array([[0.6, 0.3 - 0.2j], [0.3 + 0.2j, -0.4], [0.2j, 0.5], [0.5, -0.3j]])
    spec = ham.PauliFierzSpec(2, 2, np.diag([1.0, 1.6]), 2, np.diag([0.0, 0.8]), v, mass=1.0)
    a = np.array([[0.3, 0.4 - 0.1j], [0.4 + 0.1j, -0.2]])
    return spec, a


def suite_mourre(rng) -> list[LedgerEntry]:
    s = "mourre"
    b = build_basis(4, 4, Statistics.BOSON)
    e_lift = mo.lifted_commutator_defect(b, random_hermitian(rng, 4), random_hermitian(rng, 4))
    e_ten = tensor_rho_defect(rng)
    law = threshold_law(rng)
    spec, a = pauli_fierz_desk()
    h = ham.build_pauli_fierz(spec)
    big_a = np.kron(ops.dgamma(spec.basis, a).matrix, np.eye(spec.ell))
    e_vir = mo.virial_check(h, big_a)
    scale = h.norm() * float(np.linalg.norm(big_a, 2))
    return [_entry(s, "[dGamma(h), i dGamma(a)] = dGamma(i[h, a])", e_lift, 1e-12),
            _entry(s, "rho of a tensor sum is the inf-convolution of the factor rho's", e_ten, 1e-8),
            _entry(s, "one-particle thresholds of the flat dispersion are {m}", 1 - float(law["tau_is_m"]), 0),
            _entry(s, "cutoff threshold formula points are numeric thresholds", 1 - float(law["theory_in_numeric"]), 0),
            _entry(s, "numeric thresholds lie in the cutoff formula union point spectrum",
                   1 - float(law["numeric_in_theory_pp"]), 0),
            _entry(s, "virial: <psi|[H, iA]|psi> = 0 on eigenvectors (Pauli-Fierz)", e_vir, 1e-10 * max(scale, 1.0))]


def suite_pauli_fierz(rng) -> list[LedgerEntry]:
    s = "pauli_fierz"
    e_sym = 0.0
    for p, q in itertools.product(range(4), repeat=2):
        e_sym = max(e_sym, abs(np.linalg.norm(ham.symmetrizer(p, q, 3), 2) - ham.symmetrizer_norm_expected(p, q)))
    spec, _ = pauli_fierz_desk()
    b = spec.basis
    c = ham.coupled_creation(b, spec.ell, spec.v).matrix
    nums = np.repeat(b.particle_numbers, spec.ell)
    w = np.where(nums < b.n_max, 1 / np.sqrt(nums + 1.0), 0.0)
    e_oc1 = abs(float(np.linalg.norm(c * w[None, :], 2)) - float(np.linalg.norm(spec.v, 2)))
    f = random_vector(rng, 2)
    k = random_matrix(rng, 2)
    v_rank = np.kron(f.reshape(-1, 1), k)
    e_rank = defect(ham.coupled_creation(b, 2, v_rank), np.kron(ops.creation(b, f).matrix, k))
    reps = ham.form_bound_check(spec, [1.0, 10.0, 100.0], rng, 200)
    # worst sampled |<f|phi f>| / <f|(H_0 + r) f> relative to C(v, r); above 1 is a violation
    sampled = max(r.worst_sample_ratio / r.constant for r in reps)
    mono = all(reps[i + 1].constant <= reps[i].constant for i in range(len(reps) - 1))
    corrected = max(r.best_constant - r.corrected_constant for r in reps)
    a = random_matrix(rng, 2, 0.8)
    sm, tm = random_matrix(rng, 2), random_matrix(rng, 2)
    lhs = np.kron(ops.gamma(b, a).matrix, sm) @ c @ np.kron(np.eye(b.dim), tm)
    v2 = np.kron(a, sm) @ spec.v @ tm
    rhs = ham.coupled_creation(b, 2, v2).matrix @ np.kron(ops.gamma(b, a).matrix, np.eye(2))
    e_oc2 = defect(lhs, rhs)
    return [_entry(s, "||S_{p,q}|| = C(p+q, p)^(1/2) for p, q <= 3", e_sym, 1e-12),
            _entry(s, "||a*(v)(N+1)^(-1/2)|| = ||v||", e_oc1, 1e-10),
            _entry(s, "a*(f x K) = a*(f) x K", e_rank, 1e-12),
            _entry(s, "(Gamma(A) x S) a*(v) (1 x T) = a*((A x S) v T)(Gamma(A) x 1)", e_oc2, 1e-12),
            _entry(s, "form bound with C(v, r) on 200 random vectors, r in {1, 10, 100}", sampled, 1.0),
            _entry(s, "C(v, r) is nonincreasing in r", 1 - float(mono), 0),
            _entry(s, "best form constant <= ||(h^-1/2 x 1) v (L+r)^-1/2||", max(corrected, 0.0), 1e-10)]


SUITES: dict[str, Callable] = {
    "basis": suite_basis,
    "ccr": suite_ccr,
    "car": suite_car,
    "gram": suite_gram,
    "functor": suite_functor,
    "tensor": suite_tensor,
    "morphism": suite_morphism,
    "hvz": suite_hvz,
    "ground": suite_ground,
    "trotter": suite_trotter,
    "mourre": suite_mourre,
    "pauli_fierz": suite_pauli_fierz,
}


class UnknownSuite(ValueError):
    pass


def suite_rng(seed: int, name: str) -> np.random.Generator:
    idx = list(SUITES).index(name)
    return np.random.default_rng(np.random.SeedSequence([int(seed), idx]))


def run_suites(names, seed: int) -> list[LedgerEntry]:
    names = list(names) if names else []
    if not names or names == ["all"]:
        names = list(SUITES)
    for n in names:
        if n not in SUITES:
            raise UnknownSuite(f"unknown suite {n!r}; choose from {', '.join(['all', *SUITES])}")
    out: list[LedgerEntry] = []
    for n in names:
        out.extend(SUITES[n](suite_rng(seed, n)))
    return out
