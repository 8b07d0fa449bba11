"""Conjugate operators, commutators, ρ-functions and threshold sets.

``ρ(λ)`` is the lowest eigenvalue of ``[H, iA]`` compressed to the spectral
window ``[λ - ε, λ + ε]`` of ``H``. For a matrix this compression always has
trace zero, so ``ρ(λ) <= 0`` whenever the window is nonempty: numerically
every point of the spectrum is a threshold. Threshold sets computed here
are therefore compared against the union of thresholds and eigenvalues.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import operators as ops
from .fock_core import FockBasis
from .fockop import FockOperator, _herm_ok, as_matrix, hermitian_defect
from .spectral import SpectralDecomposition, SpectrumSet, eigh, minkowski_power, minkowski_sum

WINDOW_ATOL = 1e-12


def _mat(x) -> np.ndarray:
    return x.matrix if isinstance(x, FockOperator) else np.asarray(x, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class ConjugateSpec:
    a: np.ndarray
    A: FockOperator


def conjugate_operator(basis: FockBasis, a) -> ConjugateSpec:
    """``A = dΓ(a)`` for a Hermitian one-particle ``a``."""
    a = as_matrix(a, basis.d)
    if not _herm_ok(a):
        raise ValueError(f"conjugate operator must be Hermitian (defect {hermitian_defect(a):.3e})")
    return ConjugateSpec(a, ops.dgamma(basis, a))


def commutator(h, a):
    """``[H, iA] = i(HA - AH)``."""
    if isinstance(h, FockOperator) and isinstance(a, FockOperator):
        h._check(a)
        return FockOperator(h.basis, 1j * (h.matrix @ a.matrix - a.matrix @ h.matrix), ell=h.ell)
    hm, am = _mat(h), _mat(a)
    if hm.shape != am.shape:
        raise ValueError(f"shape mismatch {hm.shape} vs {am.shape}")
    return 1j * (hm @ am - am @ hm)


def _window(w: np.ndarray, lam: float, eps: float) -> np.ndarray:
    return np.nonzero((w >= lam - eps - WINDOW_ATOL) & (w <= lam + eps + WINDOW_ATOL))[0]


def rho(h, a, lam: float, eps: float, *, decomposition: SpectralDecomposition | None = None,
        comm: np.ndarray | None = None) -> float:
    """Best Mourre constant at ``λ`` for window half-width ``ε``; ``+inf`` on an empty window."""
    if not eps > 0:
        raise ValueError("window half-width must be positive")
    dec = eigh(h) if decomposition is None else decomposition
    c = _mat(commutator(h, a)) if comm is None else comm
    idx = _window(dec.eigenvalues, lam, eps)
    if idx.size == 0:
        return np.inf
    v = dec.eigenvectors[:, idx]
    block = v.conj().T @ c @ v
    return float(np.linalg.eigvalsh(0.5 * (block + block.conj().T))[0])


@dataclass(frozen=True, eq=False)
class RhoProfile:
    grid: np.ndarray
    epsilon: float
    values: np.ndarray
    commutator_norm: float

    def to_dict(self) -> dict:
        return {"grid": [float(x) for x in self.grid], "epsilon": self.epsilon,
                "values": [float(x) if np.isfinite(x) else "inf" for x in self.values],
                "commutator_norm": self.commutator_norm}


def rho_profile(h, a, grid: Sequence[float], eps: float, jobs: int = 1) -> RhoProfile:
    dec = eigh(h)
    c = _mat(commutator(h, a))
    grid = np.asarray(grid, dtype=float)

    def one(lam):
        return rho(h, a, float(lam), eps, decomposition=dec, comm=c)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            vals = list(ex.map(one, grid))
    else:
        vals = [one(x) for x in grid]
    cn = float(np.linalg.norm(c, 2)) if c.size else 0.0
    return RhoProfile(grid, float(eps), np.array(vals, dtype=float), cn)


class ThresholdConstruction(enum.Enum):
    NUMERIC = "numeric"
    THEORETICAL = "theoretical"


@dataclass(frozen=True, eq=False)
class ThresholdSet:
    points: SpectrumSet
    construction: ThresholdConstruction
    delta: float | None = None

    def to_dict(self) -> dict:
        return {"construction": self.construction.value, "delta": self.delta, "points": self.points.to_dict()}


def default_delta(profile: RhoProfile) -> float:
    return 1e-6 * profile.commutator_norm


def thresholds_numeric(profile: RhoProfile, delta: float | None = None) -> ThresholdSet:
    """Grid points with a nonempty window and ``ρ(λ) <= δ``."""
    delta = default_delta(profile) if delta is None else delta
    if delta < 0:
        raise ValueError("δ must be nonnegative")
    v = profile.values
    sel = np.isfinite(v) & (v <= delta)
    pts = profile.grid[sel]
    tol = 1e-12 * max(1.0, float(np.max(np.abs(profile.grid), initial=0.0)))
    return ThresholdSet(SpectrumSet.from_values(pts, tol), ThresholdConstruction.NUMERIC, float(delta))


def cluster_centers(ts: ThresholdSet, gap: float) -> SpectrumSet:
    """Merge numeric threshold points closer than ``gap`` into their means."""
    return SpectrumSet.from_values(ts.points.points, gap)


def thresholds_theoretical(tau_h: SpectrumSet, eig_h: SpectrumSet, n_terms: int) -> ThresholdSet:
    """``∪_{k<=n} τ(h)^{+k} + σ_p(H)``."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    out = None
    for k in range(1, n_terms + 1):
        part = minkowski_sum(minkowski_power(tau_h, k), eig_h)
        out = part if out is None else out.union(part)
    return ThresholdSet(out, ThresholdConstruction.THEORETICAL)


def thresholds_cutoff(tau_h: SpectrumSet, levels: Sequence[SpectrumSet], n: int) -> ThresholdSet:
    """``∪_{k=1}^{n} [τ(h)^{+k} + σ_p(H_{n-k})]``; ``levels[j]`` is ``σ_p(H_j)``."""
    if n < 1:
        raise ValueError("cutoff threshold formula needs n >= 1")
    if len(levels) < n:
        raise ValueError(f"need point spectra of H_0..H_{n - 1}, got {len(levels)} levels")
    out = None
    for k in range(1, n + 1):
        part = minkowski_sum(minkowski_power(tau_h, k), levels[n - k])
        out = part if out is None else out.union(part)
    return ThresholdSet(out, ThresholdConstruction.THEORETICAL)


def one_particle_thresholds(h, a, eps: float, delta: float | None = None, grid_step: float | None = None) -> SpectrumSet:
    """Numeric ``τ_a(h)`` clustered to one point per run of flagged grid points."""
    w = np.linalg.eigvalsh(0.5 * (_mat(h) + _mat(h).conj().T))
    step = eps / 4 if grid_step is None else grid_step
    grid = np.arange(w[0] - 2 * eps, w[-1] + 2 * eps + step / 2, step)
    prof = rho_profile(h, a, grid, eps)
    ts = thresholds_numeric(prof, delta)
    # runs of flagged points are 2ε wide around each threshold
    centers = cluster_centers(ts, 1.5 * step)
    return SpectrumSet.from_values(centers.points, step)


# -- structural checks ---------------------------------------------------


def lifted_commutator_defect(basis: FockBasis, h, a) -> float:
    """‖[dΓ(h), i dΓ(a)] − dΓ(i[h, a])‖."""
    h = as_matrix(h, basis.d)
    a = as_matrix(a, basis.d)
    lhs = _mat(commutator(ops.dgamma(basis, h), ops.dgamma(basis, a)))
    rhs = ops.dgamma(basis, 1j * (h @ a - a @ h)).matrix
    return float(np.linalg.norm(lhs - rhs, 2))


@dataclass(frozen=True)
class TensorRhoReport:
    grid: tuple
    direct: tuple
    convolution: tuple
    defect: float


def _conv(lam: float, w1: np.ndarray, r1: np.ndarray, w2: np.ndarray, r2: np.ndarray, tol: float) -> float:
    best = np.inf
    for i, x in enumerate(w1):
        for j, y in enumerate(w2):
            if abs(x + y - lam) <= tol:
                best = min(best, r1[i] + r2[j])
    return best


def tensor_rho_check(h1, a1, h2, a2, grid: Sequence[float] | None, eps: float) -> TensorRhoReport:
    """ρ of ``H1⊗1 + 1⊗H2`` against the inf-convolution of the factor ρ's.

    Factor ρ's are taken at their distinct eigenvalues; ``grid`` defaults to
    all eigenvalue sums, where the comparison is exact when ``ε`` is below
    every gap of the three spectra.
    """
    m1, m2 = _mat(h1), _mat(h2)
    n1, n2 = m1.shape[0], m2.shape[0]
    big_h = np.kron(m1, np.eye(n2)) + np.kron(np.eye(n1), m2)
    big_a = np.kron(_mat(a1), np.eye(n2)) + np.kron(np.eye(n1), _mat(a2))
    w1 = np.unique(np.round(np.linalg.eigvalsh(m1), 12))
    w2 = np.unique(np.round(np.linalg.eigvalsh(m2), 12))
    r1 = np.array([rho(m1, a1, x, eps) for x in w1])
    r2 = np.array([rho(m2, a2, x, eps) for x in w2])
    if grid is None:
        grid = np.unique(np.round((w1[:, None] + w2[None, :]).reshape(-1), 12))
    dec = eigh(big_h)
    c = _mat(commutator(big_h, big_a))
    direct, conv = [], []
    for lam in grid:
        direct.append(rho(big_h, big_a, float(lam), eps, decomposition=dec, comm=c))
        conv.append(_conv(float(lam), w1, r1, w2, r2, eps))
    dv, cv = np.array(direct), np.array(conv)
    both = np.isfinite(dv) & np.isfinite(cv)
    mismatch_inf = np.any(np.isfinite(dv) != np.isfinite(cv))
    defect = np.inf if mismatch_inf else float(np.max(np.abs(dv[both] - cv[both]), initial=0.0))
    return TensorRhoReport(tuple(float(x) for x in grid), tuple(direct), tuple(conv), defect)


def virial_check(h, a) -> float:
    """``max_ψ |⟨ψ|[H, iA]|ψ⟩|`` over the eigenvectors of ``H``."""
    dec = eigh(h)
    c = _mat(commutator(h, a))
    v = dec.eigenvectors
    vals = np.einsum("ij,ij->j", v.conj(), c @ v)
    return float(np.max(np.abs(vals), initial=0.0))


def window_trace(h, a, lam: float, eps: float) -> float:
    """Trace of the windowed commutator; zero for every matrix pair."""
    dec = eigh(h)
    c = _mat(commutator(h, a))
    idx = _window(dec.eigenvalues, lam, eps)
    v = dec.eigenvectors[:, idx]
    return float(np.trace(v.conj().T @ c @ v).real)
