"""Generator words, the canonical morphism on them, and its probe-mode realization.

On canonical words (field-type factors, then at most one ``Gamma``, then
number functions) the morphism acts by

* ``φ(u)^k Γ(A) θ(N)  ->  A ⊗ φ(u)^k Γ(A) θ(N + 1)``
* ``W(u) θ(N)         ->  1 ⊗ W(u) θ(N + 1)``

Numerically the same map is ``T -> a(e) T a*(e)`` restricted to states with
no particle in a probe mode ``e`` that the word does not touch; for
fermions ``T`` is first conjugated by the grading unitary.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence, Union

import numpy as np

from . import operators as ops
from .fock_core import FockBasis, build_basis
from .fockop import FockOperator, as_vector

# -- factors -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldPower:
    u: np.ndarray
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "u", as_vector(self.u))
        if self.k < 0:
            raise ValueError("field power must be nonnegative")


@dataclass(frozen=True, eq=False)
class Weyl:
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", as_vector(self.u))


@dataclass(frozen=True, eq=False)
class Gamma:
    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("Gamma factor needs a square matrix")
        nrm = np.linalg.norm(a, 2) if a.size else 0.0
        if not nrm < 1:
            raise ValueError(f"Gamma factor must be a strict contraction, norm is {nrm:.6g}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)


@dataclass(frozen=True, eq=False)
class NumberFunction:
    """``θ(N)`` from samples ``θ(0), θ(1), ...``; zero past the last sample."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.complex128).reshape(-1)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def shifted(self, k: int = 1) -> "NumberFunction":
        return NumberFunction(self.samples[k:])

    @property
    def is_zero(self) -> bool:
        return not np.any(self.samples != 0)


@dataclass(frozen=True)
class SectorProj:
    n: int


@dataclass(frozen=True)
class Scalar:
    c: complex


Factor = Union[FieldPower, Weyl, Gamma, NumberFunction, SectorProj, Scalar]

_FIELD_TYPES = (FieldPower, Weyl)
_NUMBER_TYPES = (NumberFunction, SectorProj)


class NotCanonical(ValueError):
    """A word that is not in the ``fields · Gamma · θ(N)`` order."""


class SupportError(ValueError):
    pass


def _vector_support(u: np.ndarray) -> set[int]:
    return {int(j) for j in np.nonzero(u)[0]}


def _matrix_support(a: np.ndarray) -> set[int]:
    off = a - np.diag(np.diag(a))
    rows, cols = np.nonzero(off)
    return {int(j) for j in rows} | {int(j) for j in cols}


@dataclass(frozen=True)
class Word:
    factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def support(self) -> set[int]:
        """Modes touched by the word; diagonal entries of Gamma factors do not count."""
        s: set[int] = set()
        for f in self.factors:
            if isinstance(f, (FieldPower, Weyl)):
                s |= _vector_support(f.u)
            elif isinstance(f, Gamma):
                s |= _matrix_support(f.a)
        return s

    @property
    def field_degree(self) -> int:
        return sum(f.k for f in self.factors if isinstance(f, FieldPower))

    def is_canonical(self) -> bool:
        stage = 0
        gammas = 0
        for f in self.factors:
            if isinstance(f, Scalar):
                continue
            if isinstance(f, _FIELD_TYPES):
                want = 0
            elif isinstance(f, Gamma):
                want = 1
                gammas += 1
            elif isinstance(f, _NUMBER_TYPES):
                want = 2
            else:
                return False
            if want < stage:
                return False
            stage = want
        return gammas <= 1


def word(*factors) -> Word:
    return Word(tuple(factors))


@dataclass(frozen=True)
class AlgebraElement:
    """Finite complex combination of words."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((complex(c), w) for c, w in self.terms))

    @classmethod
    def of(cls, w: Word | Sequence, coeff: complex = 1.0) -> "AlgebraElement":
        if not isinstance(w, Word):
            w = Word(tuple(w))
        return cls(((coeff, w),))

    @property
    def support(self) -> set[int]:
        s: set[int] = set()
        for _, w in self.terms:
            s |= w.support
        return s

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.terms + other.terms)

    def __mul__(self, c) -> "AlgebraElement":
        return AlgebraElement(tuple((c * k, w) for k, w in self.terms))

    __rmul__ = __mul__

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(tuple((c1 * c2, Word(w1.factors + w2.factors))
                                    for c1, w1 in self.terms for c2, w2 in other.terms))


def as_element(x) -> AlgebraElement:
    if isinstance(x, AlgebraElement):
        return x
    if isinstance(x, Word):
        return AlgebraElement.of(x)
    return AlgebraElement.of(Word(tuple(x)))


# -- evaluation ----------------------------------------------------------


def _fit_vector(u: np.ndarray, d: int) -> np.ndarray:
    if u.shape[0] <= d:
        out = np.zeros(d, dtype=np.complex128)
        out[: u.shape[0]] = u
        return out
    if np.any(u[d:] != 0):
        raise SupportError(f"vector support {sorted(_vector_support(u))} exceeds {d} modes")
    return u[:d]


def _fit_matrix(a: np.ndarray, d: int) -> np.ndarray:
    if a.shape[0] == d:
        return a
    if a.shape[0] < d:
        raise SupportError(f"Gamma factor is {a.shape[0]}x{a.shape[0]}, basis has {d} modes")
    off = a.copy()
    off[:d, :d] = 0
    off[d:, d:] = 0
    if np.any(off != 0):
        raise SupportError(f"Gamma factor couples modes beyond the first {d}")
    return a[:d, :d]


def factor_matrix(f: Factor, basis: FockBasis) -> np.ndarray:
    if isinstance(f, FieldPower):
        phi = ops.field(basis, _fit_vector(f.u, basis.d)).matrix
        return np.linalg.matrix_power(phi, f.k)
    if isinstance(f, Weyl):
        return ops.weyl(basis, _fit_vector(f.u, basis.d)).matrix
    if isinstance(f, Gamma):
        return ops.gamma(basis, _fit_matrix(f.a, basis.d)).matrix
    if isinstance(f, NumberFunction):
        return ops.number_function(basis, f.samples).matrix
    if isinstance(f, SectorProj):
        return np.diag((basis.particle_numbers == f.n).astype(np.complex128))
    if isinstance(f, Scalar):
        return f.c * np.eye(basis.dim, dtype=np.complex128)
    raise TypeError(f"unknown factor {f!r}")


def evaluate(element, basis: FockBasis) -> FockOperator:
    """Matrix of an algebra element: products in word order, summed over terms."""
    element = as_element(element)
    total = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for c, w in element.terms:
        m = np.eye(basis.dim, dtype=np.complex128)
        for f in w.factors:
            m = m @ factor_matrix(f, basis)
        total += c * m
    return FockOperator(basis, total)


# -- symbolic morphism ---------------------------------------------------


@dataclass(frozen=True)
class ImageTerm:
    """``coeff · (A_1 ⊗ ... ⊗ A_k) ⊗ [word]``; ``None`` stands for the identity."""

    coeff: complex
    one_particle: tuple
    word: Word

    def probe_factor(self, probes: Sequence[int]) -> complex:
        """Value of the one-particle tensor factors on the probe vectors ``e_{probes[i]}``."""
        val = 1.0 + 0.0j
        for a, p in zip(self.one_particle, probes):
            if a is not None:
                val *= a[p, p]
        return val


@dataclass(frozen=True)
class MorphismImage:
    terms: tuple = dc_field(default=())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def one_particle_part(self):
        if len(self.terms) != 1:
            raise ValueError("one_particle_part is defined for single-word images")
        parts = self.terms[0].one_particle
        if len(parts) != 1:
            raise ValueError("iterated image has several one-particle factors")
        return parts[0]

    @property
    def fock_part(self) -> AlgebraElement:
        return AlgebraElement(tuple((t.coeff, t.word) for t in self.terms))

    def evaluate_at_probes(self, basis: FockBasis, probes: Sequence[int]) -> FockOperator:
        """Σ coeff · Π⟨e_p|A|e_p⟩ · [word] on ``basis``."""
        total = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
        for t in self.terms:
            c = t.coeff * t.probe_factor(probes)
            if c != 0:
                total += c * evaluate(AlgebraElement.of(t.word), basis).matrix
        return FockOperator(basis, total)


def _word_image(w: Word):
    if not w.is_canonical():
        raise NotCanonical(f"word {w} is not in canonical order (fields, Gamma, number functions)")
    one = None
    new = []
    for f in w.factors:
        if isinstance(f, Gamma):
            one = f.a
            new.append(f)
        elif isinstance(f, NumberFunction):
            g = f.shifted()
            if g.is_zero:
                return None
            new.append(g)
        elif isinstance(f, SectorProj):
            if f.n == 0:
                return None
            new.append(SectorProj(f.n - 1))
        else:
            new.append(f)
    return one, Word(tuple(new))


def canonical_image(element) -> MorphismImage:
    """Symbolic image of a combination of canonical words."""
    return _apply_image(MorphismImage(tuple(ImageTerm(c, (), w) for c, w in as_element(element).terms)))


def _apply_image(img: MorphismImage) -> MorphismImage:
    out = []
    for t in img.terms:
        res = _word_image(t.word)
        if res is None:
            continue
        one, w = res
        out.append(ImageTerm(t.coeff, t.one_particle + (one,), w))
    return MorphismImage(tuple(out))


def iterate_morphism(element, k: int) -> list[MorphismImage]:
    """Images ``P(T), P^2(T), ..., P^k(T)``."""
    img = MorphismImage(tuple(ImageTerm(c, (), w) for c, w in as_element(element).terms))
    chain = []
    for _ in range(k):
        img = _apply_image(img)
        chain.append(img)
    return chain


def decay_check(element, max_iter: int = 64) -> int | None:
    """First ``k`` with ``P^k(T) = 0`` symbolically, or ``None`` within ``max_iter``."""
    img = MorphismImage(tuple(ImageTerm(c, (), w) for c, w in as_element(element).terms))
    for k in range(1, max_iter + 1):
        img = _apply_image(img)
        if img.is_zero:
            return k
    return None


# -- numeric morphism ----------------------------------------------------


def probe_free_basis(basis: FockBasis, probe: int) -> FockBasis:
    if not 0 <= probe < basis.d:
        raise ValueError(f"probe mode {probe} outside 0..{basis.d - 1}")
    if basis.d < 2:
        raise ValueError("need at least one mode besides the probe")
    if basis.n_max == 0:
        raise ValueError("cutoff 0 has no room for a probe particle")
    n = basis.n_max - 1
    if basis.is_fermionic:
        n = min(n, basis.d - 1)
    return build_basis(basis.d - 1, n, basis.statistics)


def _probe_embedding(basis: FockBasis, sub: FockBasis, probe: int) -> np.ndarray:
    occ = np.insert(sub.occupations, probe, 0, axis=1)
    cols = np.array([basis.index(r) for r in occ], dtype=np.int64)
    j = np.zeros((basis.dim, sub.dim))
    j[cols, np.arange(sub.dim)] = 1.0
    return j


def numeric_morphism(T: FockOperator, basis: FockBasis | None = None, probe: int | None = None,
                     *, use_grading: bool | None = None, support=None) -> FockOperator:
    """``a(e) T a*(e)`` restricted to probe-free states with at most ``N - 1`` particles.

    ``probe`` defaults to the last mode. For fermionic bases ``T`` is first
    replaced by ``w T w†`` (``use_grading=False`` skips this, which gives
    the wrong sign on odd operators). ``support``, if given, is checked to
    avoid the probe.
    """
    basis = T.basis if basis is None else basis
    if T.basis != basis:
        raise ValueError("operator and basis differ")
    probe = basis.d - 1 if probe is None else probe
    if support is not None and probe in set(support):
        raise SupportError(f"probe mode {probe} lies in the support {sorted(support)}")
    sub = probe_free_basis(basis, probe)
    m = T.matrix
    if use_grading is None:
        use_grading = basis.is_fermionic
    if use_grading:
        w = ops.grading(basis).matrix
        m = w @ m @ w.conj().T
    e = ops.unit_vector(basis.d, probe)
    c = ops.creation(basis, e).matrix
    j = _probe_embedding(basis, sub, probe)
    return FockOperator(sub, j.T @ c.conj().T @ m @ c @ j)


def numeric_morphism_element(element, basis: FockBasis, probe: int | None = None, **kw) -> FockOperator:
    element = as_element(element)
    probe = basis.d - 1 if probe is None else probe
    return numeric_morphism(evaluate(element, basis), basis, probe, support=element.support, **kw)


def iterate_numeric(element, basis: FockBasis, k: int, **kw) -> list[FockOperator]:
    """``k`` successive probe-mode morphisms using the last ``k`` modes as probes."""
    element = as_element(element)
    if element.support & set(range(basis.d - k, basis.d)):
        raise SupportError("probe modes intersect the element support")
    T = evaluate(element, basis)
    out = []
    for _ in range(k):
        T = numeric_morphism(T, T.basis, T.basis.d - 1, **kw)
        out.append(T)
    return out


def morphism_exactness_defect(element, basis: FockBasis, probe: int | None = None, **kw) -> float:
    """‖numeric image − evaluated symbolic image‖ on the probe-free sub-basis."""
    probe = basis.d - 1 if probe is None else probe
    num = numeric_morphism_element(element, basis, probe, **kw)
    sym = canonical_image(element).evaluate_at_probes(num.basis, [probe])
    return _norm(num.matrix - _reindex_probe(sym, probe, basis).matrix)


def _reindex_probe(op: FockOperator, probe: int, basis: FockBasis) -> FockOperator:
    # words are written over the full mode list; the sub-basis drops the probe
    # mode, which is only transparent when the probe is the last mode
    if probe != basis.d - 1:
        raise NotImplementedError("symbolic comparison expects the probe to be the last mode")
    return op


def _norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def morphism_multiplicativity_check(T1: FockOperator, T2: FockOperator, basis: FockBasis | None = None,
                                    probe: int | None = None, deg: int = 0, **kw) -> float:
    """‖P(T1 T2) − P(T1) P(T2)‖ on ``ran 1_{N-1-deg}`` of the probe-free sub-basis."""
    basis = T1.basis if basis is None else basis
    p12 = numeric_morphism(T1 @ T2, basis, probe, **kw)
    p1 = numeric_morphism(T1, basis, probe, **kw)
    p2 = numeric_morphism(T2, basis, probe, **kw)
    diff = (p12 - p1 @ p2).restrict_columns(p12.basis.n_max - deg)
    return diff.norm()
