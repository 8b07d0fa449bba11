"""Diagonalization, spectrum sets and the essential-spectrum formulas at finite cutoff.

Finite matrices have no essential spectrum, so here it means the spectrum
of the descended model ``σ(h) + σ(H_{N-1})`` (or a fibered union of such
sets). Direct diagonalization enters only as the invariant-subspace
witness in :func:`morphism_spectrum_check`.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import linalg as sla

from . import hamiltonians as ham
from . import operators as ops
from .fock_core import Statistics
from .fockop import FockOperator, _herm_ok, hermitian_defect
from .morphism import _probe_embedding, probe_free_basis

DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float

    @property
    def gram_defect(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1])), initial=0.0))


def _clusters(w: np.ndarray, tol: float) -> list[slice]:
    out, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol:
            out.append(slice(start, i))
            start = i
    return out


def _fix_phases(v: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(v) > np.abs(v).max(axis=0, keepdims=True) * (1 - 1e-8), axis=0)
    ph = v[idx, np.arange(v.shape[1])]
    return v * (np.abs(ph) / ph)[None, :]


def _canonical_subspace_basis(vc: np.ndarray) -> np.ndarray:
    # rebuild the basis from the projector onto the subspace, which does not
    # depend on the solver's choice of eigenvectors
    k = vc.shape[1]
    p = vc @ vc.conj().T
    _, _, piv = sla.qr(p, pivoting=True, mode="economic")
    q, r = np.linalg.qr(p[:, np.sort(piv[:k])])
    d = np.diag(r)
    q = q * (np.abs(d) / np.where(d == 0, 1, d))[None, :]
    return q


def eigh(h, *, degeneracy_rtol: float = DEGENERACY_RTOL) -> SpectralDecomposition:
    """Ascending eigenvalues with deterministic eigenvectors.

    Degenerate clusters are re-orthonormalized from their spectral
    projector, and every eigenvector's largest component is made real positive.
    """
    m = h.matrix if isinstance(h, FockOperator) else np.asarray(h, dtype=np.complex128)
    if not _herm_ok(m, 1e-10):
        raise ValueError(f"eigh needs a Hermitian matrix (defect {hermitian_defect(m):.3e})")
    if m.shape[0] == 0:
        return SpectralDecomposition(np.zeros(0), np.zeros((0, 0), complex), 0.0)
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    scale = max(1.0, float(np.max(np.abs(w))))
    for c in _clusters(w, degeneracy_rtol * scale):
        if c.stop - c.start > 1:
            v[:, c] = _canonical_subspace_basis(v[:, c])
            w[c] = w[c].mean()
    v = _fix_phases(v)
    res = float(np.max(np.linalg.norm(m @ v - v * w[None, :], axis=0)))
    return SpectralDecomposition(w, v, res)


def eigvals(h) -> np.ndarray:
    m = h.matrix if isinstance(h, FockOperator) else np.asarray(h, dtype=np.complex128)
    if m.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def eigh_many(ops_: Sequence, jobs: int = 1) -> list[SpectralDecomposition]:
    if jobs <= 1:
        return [eigh(h) for h in ops_]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(eigh, ops_))


# -- spectrum sets ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectrumSet:
    """Sorted isolated points with multiplicities, plus closed intervals.

    ``hi = inf`` is allowed for half-lines.
    """

    points: np.ndarray
    multiplicities: np.ndarray
    dedup_tol: float
    intervals: tuple = ()

    @classmethod
    def from_values(cls, values: Iterable[float], dedup_tol: float | None = None,
                    multiplicities: Iterable[int] | None = None, intervals: Iterable = ()) -> "SpectrumSet":
        vals = np.asarray(list(values), dtype=float).reshape(-1)
        mult = np.ones(vals.size, dtype=np.int64) if multiplicities is None else \
            np.asarray(list(multiplicities), dtype=np.int64)
        order = np.argsort(vals, kind="stable")
        vals, mult = vals[order], mult[order]
        if dedup_tol is None:
            diam = float(vals[-1] - vals[0]) if vals.size else 0.0
            dedup_tol = 1e-8 * max(diam, 1.0)
        pts, ms = [], []
        for c in _clusters(vals, dedup_tol):
            pts.append(float(np.average(vals[c], weights=mult[c])))
            ms.append(int(mult[c].sum()))
        ivs = _merge_intervals(intervals)
        return cls(np.array(pts), np.array(ms, dtype=np.int64), float(dedup_tol), ivs)

    @classmethod
    def empty(cls) -> "SpectrumSet":
        return cls(np.zeros(0), np.zeros(0, dtype=np.int64), 0.0)

    def __len__(self):
        return self.points.size

    @property
    def is_empty(self) -> bool:
        return self.points.size == 0 and not self.intervals

    @property
    def min(self) -> float:
        cands = list(self.points[:1]) + [lo for lo, _ in self.intervals]
        if not cands:
            raise ValueError("empty spectrum set")
        return float(min(cands))

    def contains(self, x: float, tol: float | None = None) -> bool:
        tol = self.dedup_tol if tol is None else tol
        if self.points.size and np.min(np.abs(self.points - x)) <= tol:
            return True
        return any(lo - tol <= x <= hi + tol for lo, hi in self.intervals)

    def distance(self, x: float) -> float:
        ds = [float(np.min(np.abs(self.points - x)))] if self.points.size else []
        for lo, hi in self.intervals:
            ds.append(0.0 if lo <= x <= hi else min(abs(x - lo), abs(x - hi)))
        return min(ds) if ds else np.inf

    def subset_of(self, other: "SpectrumSet", tol: float) -> bool:
        return all(other.contains(x, tol) for x in self.points) and all(
            any(lo2 - tol <= lo and hi <= hi2 + tol for lo2, hi2 in other.intervals) for lo, hi in self.intervals)

    def union(self, other: "SpectrumSet", dedup_tol: float | None = None) -> "SpectrumSet":
        tol = max(self.dedup_tol, other.dedup_tol) if dedup_tol is None else dedup_tol
        return SpectrumSet.from_values(np.r_[self.points, other.points], tol,
                                       np.r_[self.multiplicities, other.multiplicities],
                                       self.intervals + other.intervals)

    def shifted(self, c: float) -> "SpectrumSet":
        return SpectrumSet(self.points + c, self.multiplicities.copy(), self.dedup_tol,
                           tuple((lo + c, hi + c) for lo, hi in self.intervals))

    def approx_equal(self, other: "SpectrumSet", tol: float) -> bool:
        return self.subset_of(other, tol) and other.subset_of(self, tol)

    def to_dict(self) -> dict:
        return {"points": [float(x) for x in self.points],
                "multiplicities": [int(m) for m in self.multiplicities],
                "dedup_tol": self.dedup_tol,
                "intervals": [[float(lo), float(hi)] for lo, hi in self.intervals]}


def _merge_intervals(intervals) -> tuple:
    ivs = sorted((float(lo), float(hi)) for lo, hi in intervals)
    out: list[list[float]] = []
    for lo, hi in ivs:
        if hi < lo:
            raise ValueError(f"interval [{lo}, {hi}] is empty")
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def spectrum_of(h, dedup_tol: float | None = None) -> SpectrumSet:
    return SpectrumSet.from_values(eigvals(h), dedup_tol)


def minkowski_sum(s1: SpectrumSet, s2: SpectrumSet, tol: float | None = None) -> SpectrumSet:
    """``{λ + μ}`` with product multiplicities; intervals add as intervals."""
    pts = (s1.points[:, None] + s2.points[None, :]).reshape(-1)
    mult = (s1.multiplicities[:, None] * s2.multiplicities[None, :]).reshape(-1)
    ivs = [(lo + p, hi + p) for lo, hi in s1.intervals for p in s2.points]
    ivs += [(lo + p, hi + p) for lo, hi in s2.intervals for p in s1.points]
    ivs += [(a + c, b + e) for a, b in s1.intervals for c, e in s2.intervals]
    if tol is None:
        tol = max(s1.dedup_tol, s2.dedup_tol)
        if pts.size:
            tol = max(tol, 1e-8 * max(1.0, float(pts.max() - pts.min())))
    return SpectrumSet.from_values(pts, tol, mult, ivs)


def minkowski_power(s: SpectrumSet, k: int) -> SpectrumSet:
    if k < 1:
        raise ValueError("Minkowski power needs k >= 1")
    out = s
    for _ in range(k - 1):
        out = minkowski_sum(out, s)
    return out


# -- essential spectrum --------------------------------------------------


class EssMethod(enum.Enum):
    HVZ_RECURSION = "hvz_recursion"
    FIBERED_UNION = "fibered_union"
    DIRECT_WITNESS = "direct_witness"


@dataclass(frozen=True, eq=False)
class EssSpectrumReport:
    method: EssMethod
    result: SpectrumSet
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        prov = {k: (v.to_dict() if isinstance(v, SpectrumSet) else v) for k, v in self.provenance.items()}
        return {"method": self.method.value, "result": self.result.to_dict(), "provenance": prov}


def hvz_essential_spectrum(spec: ham.QfhSpec, sigma_h: SpectrumSet | None = None) -> EssSpectrumReport:
    """``σ(h) + σ(H_{N-1})``; ``sigma_h`` may replace the discrete ``σ(h)``, e.g. by a half-line."""
    if spec.n_max < 1:
        raise ValueError("the essential spectrum formula needs cutoff >= 1")
    sh = spectrum_of(spec.h) if sigma_h is None else sigma_h
    lower = spectrum_of(ham.build_qfh(ham.descend(spec)))
    return EssSpectrumReport(EssMethod.HVZ_RECURSION, minkowski_sum(sh, lower),
                             {"sigma_h": sh, "sigma_lower": lower, "n_max": spec.n_max})


def hvz_chain(spec: ham.QfhSpec, k: int) -> SpectrumSet:
    """``σ(h)^{+k} + σ(H_{N-k})``."""
    sh = spectrum_of(spec.h)
    return minkowski_sum(minkowski_power(sh, k), spectrum_of(ham.build_qfh(ham.descend(spec, k))))


@dataclass(frozen=True, eq=False)
class WitnessReport:
    lam_e: float
    restricted: np.ndarray
    expected: np.ndarray
    defect: float
    invariance_defect: float
    isometry_defect: float

    def to_dict(self) -> dict:
        return {"lam_e": self.lam_e, "defect": self.defect, "invariance_defect": self.invariance_defect,
                "isometry_defect": self.isometry_defect,
                "restricted": [float(x) for x in self.restricted],
                "expected": [float(x) for x in self.expected]}


def morphism_spectrum_check(spec: ham.QfhSpec, lam_e: float | None = None) -> WitnessReport:
    """Eigenvalues of ``H_N`` on ``a*(e) Γ_{N-1}(E)`` against ``λ_e + σ(H_{N-1})``.

    With ``lam_e`` the model is extended by a decoupled probe mode; without
    it the last mode of ``spec`` must already be decoupled and is used.
    """
    if lam_e is not None:
        base = spec
        full = ham.with_probe(spec, lam_e)
    else:
        if not ham.probe_decoupled(spec):
            raise ValueError("the last mode is coupled by h or the interaction; it cannot serve as probe")
        full = spec
        lam_e = float(spec.h[-1, -1].real)
        sub_h = spec.h[:-1, :-1]
        inter = spec.interaction.padded(spec.d - 1)
        base = ham.QfhSpec(spec.statistics, spec.d - 1, spec.n_max, sub_h, inter)
    if full.n_max < 1:
        raise ValueError("the witness needs cutoff >= 1")
    if full.statistics is Statistics.FERMION and isinstance(full.interaction, ham.PolynomialField) \
            and full.interaction.has_odd_terms():
        raise ValueError("odd fermionic interactions anticommute with the probe creation operator")
    h_full = ham.build_qfh(full)
    b = h_full.basis
    sub = probe_free_basis(b, b.d - 1)
    j = ops.creation(b, ops.unit_vector(b.d, b.d - 1)).matrix @ _probe_embedding(b, sub, b.d - 1)
    restricted_m = j.conj().T @ h_full.matrix @ j
    hj = h_full.matrix @ j
    inv = float(np.linalg.norm(hj - j @ (j.conj().T @ hj), 2))
    iso = float(np.linalg.norm(j.conj().T @ j - np.eye(sub.dim), 2))
    restricted = eigvals(restricted_m)
    lower = ham.build_qfh(ham.descend(base)) if base.n_max >= 1 else None
    exp_vals = np.sort(lam_e + eigvals(lower)) if lower is not None else np.zeros(0)
    if lower is not None and lower.basis.dim != sub.dim:
        raise RuntimeError("probe-free sub-basis and descended basis differ in size")
    defect = float(np.max(np.abs(restricted - exp_vals), initial=0.0))
    return WitnessReport(float(lam_e), restricted, exp_vals, defect, inv, iso)


FamilyT = Callable[[float], np.ndarray]


def fibered_union(h_family, grid: Sequence[float] | None, interaction, n_max: int,
                  statistics="boson", jobs: int = 1, sigma_atol: float | None = None) -> EssSpectrumReport:
    """Union over the grid of ``σ(h(x)) + σ(H_{N-1}(x))``.

    ``h_family`` is a callable evaluated on ``grid`` or a sequence of matrices.
    """
    if callable(h_family):
        if grid is None or len(grid) == 0:
            raise ValueError("fibered union needs a nonempty grid")
        hs = [np.atleast_2d(np.asarray(h_family(x), dtype=np.complex128)) for x in grid]
        xs = [float(x) for x in grid]
    else:
        hs = [np.atleast_2d(np.asarray(h, dtype=np.complex128)) for h in h_family]
        xs = list(range(len(hs))) if grid is None else [float(x) for x in grid]
    if not hs:
        raise ValueError("fibered union needs a nonempty grid")

    def one(h):
        spec = ham.QfhSpec(statistics, h.shape[0], n_max, h, interaction)
        return hvz_essential_spectrum(spec).result

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(one, hs))
    else:
        parts = [one(h) for h in hs]
    out = parts[0]
    for p in parts[1:]:
        out = out.union(p, sigma_atol)
    return EssSpectrumReport(EssMethod.FIBERED_UNION, out,
                             {"grid": xs, "grid_approximation": True, "n_max": n_max})


class GapViolation(RuntimeError):
    """A massive model whose ground energy is not below the essential spectrum."""


@dataclass(frozen=True)
class GroundStateReport:
    ground_energy: float
    multiplicity: int
    gap: float
    mass: float | None
    mass_defect: float | None

    @property
    def isolated(self) -> bool:
        return self.gap > 0

    def to_dict(self) -> dict:
        return {"ground_energy": self.ground_energy, "multiplicity": self.multiplicity, "gap": self.gap,
                "mass": self.mass, "mass_defect": self.mass_defect}


def ground_state_report(h, sigma_ess: SpectrumSet, mass: float | None = None) -> GroundStateReport:
    w = eigvals(h)
    e0 = float(w[0])
    tol = DEGENERACY_RTOL * max(1.0, float(np.max(np.abs(w))))
    mult = int(np.sum(w <= e0 + tol))
    gap = sigma_ess.min - e0
    if mass is not None and not gap > 0:
        raise GapViolation(f"ground state not isolated: gap {gap:.6g} with mass {mass:.6g}")
    return GroundStateReport(e0, mult, float(gap), mass, None if mass is None else float(mass - gap))
