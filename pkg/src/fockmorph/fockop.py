"""Matrix containers for one-particle and Fock-space operators."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .fock_core import FockBasis

HERMITIAN_TOL = 1e-12


class BasisMismatch(ValueError):
    pass


def as_vector(u, d: int | None = None) -> np.ndarray:
    """Coerce a one-particle vector to a complex array, checking its length."""
    u = np.asarray(u, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(u)):
        raise ValueError("one-particle vector has non-finite entries")
    if d is not None and u.shape[0] != d:
        raise ValueError(f"one-particle vector has length {u.shape[0]}, basis has {d} modes")
    return u


def hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def _herm_ok(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    return hermitian_defect(m) <= tol * scale


@dataclass(frozen=True)
class OneParticleOperator:
    """A ``d x d`` matrix with optional, verified, structural flags."""

    matrix: np.ndarray
    hermitian: bool = False
    positive: bool = False
    contraction: bool = False
    tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"one-particle operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("one-particle operator has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if (self.hermitian or self.positive) and not _herm_ok(m, self.tol):
            raise ValueError(f"operator is not Hermitian (defect {hermitian_defect(m):.3e})")
        if self.positive:
            low = float(np.linalg.eigvalsh(m).min())
            if low < -self.tol:
                raise ValueError(f"operator is not positive (min eigenvalue {low:.6g})")
        if self.contraction:
            nrm = float(np.linalg.norm(m, 2))
            if not nrm < 1:
                raise ValueError(f"operator norm {nrm:.6g} is not < 1")

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def as_matrix(a, d: int | None = None) -> np.ndarray:
    if isinstance(a, OneParticleOperator):
        a = a.matrix
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        if d is None:
            raise ValueError("scalar one-particle operator needs a dimension")
        return a * np.eye(d, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"one-particle operator must be square, got shape {a.shape}")
    if d is not None and a.shape[0] != d:
        raise ValueError(f"one-particle operator is {a.shape[0]}x{a.shape[0]}, basis has {d} modes")
    return a


class FockOperator:
    """Complex matrix over a :class:`FockBasis`, optionally tensored with a
    finite internal space of dimension ``ell`` (row index ``i * ell + alpha``).

    The matrix is stored read-only. ``hermitian=True`` asks for verification
    at construction and raises if it fails.
    """

    __array_priority__ = 100

    def __init__(self, basis: FockBasis, matrix, *, ell: int = 1, hermitian: bool | None = None):
        m = np.array(matrix, dtype=np.complex128)
        size = basis.dim * ell
        if m.shape != (size, size):
            raise BasisMismatch(f"matrix shape {m.shape} does not match basis dimension {size}")
        m.setflags(write=False)
        self.basis = basis
        self.ell = ell
        self.matrix = m
        if hermitian and not _herm_ok(m):
            raise ValueError(f"operator declared Hermitian has defect {hermitian_defect(m):.3e}")

    # -- metadata ----------------------------------------------------------
    @cached_property
    def is_hermitian(self) -> bool:
        return _herm_ok(self.matrix)

    @cached_property
    def row_sectors(self) -> np.ndarray:
        return np.repeat(self.basis.particle_numbers, self.ell)

    @cached_property
    def sector_shift(self):
        """``k`` if the operator maps sector ``n`` into ``n + k`` only, else ``"mixed"``."""
        nz_r, nz_c = np.nonzero(self.matrix)
        if nz_r.size == 0:
            return 0
        sec = self.row_sectors
        shifts = np.unique(sec[nz_r] - sec[nz_c])
        return int(shifts[0]) if shifts.size == 1 else "mixed"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _index_slice(self, n: int) -> slice:
        s = self.basis.sector_slice(n)
        return slice(s.start * self.ell, s.stop * self.ell)

    def block(self, n: int, m: int) -> np.ndarray:
        """Block mapping sector ``m`` into sector ``n``."""
        return self.matrix[self._index_slice(n), self._index_slice(m)]

    def blocks(self) -> list[np.ndarray]:
        """Diagonal sector blocks; only a faithful representation when ``sector_shift == 0``."""
        return [self.block(n, n) for n in range(self.basis.n_max + 1)]

    # -- algebra -----------------------------------------------------------
    def _check(self, other: "FockOperator"):
        if other.basis != self.basis or other.ell != self.ell:
            raise BasisMismatch(f"{self.basis!r} (ell={self.ell}) vs {other.basis!r} (ell={other.ell})")

    def _new(self, m) -> "FockOperator":
        return FockOperator(self.basis, m, ell=self.ell)

    def __add__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return self._new(self.matrix + other.matrix)
        if np.isscalar(other):
            return self._new(self.matrix + other * np.eye(self.dim))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.matrix)

    def __sub__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return self._new(self.matrix - other.matrix)
        if np.isscalar(other):
            return self._new(self.matrix - other * np.eye(self.dim))
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, c):
        if np.isscalar(c):
            return self._new(c * self.matrix)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self._new(self.matrix / c)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return self._new(self.matrix @ other.matrix)
        return self.matrix @ np.asarray(other)

    def __pow__(self, k: int):
        return self._new(np.linalg.matrix_power(self.matrix, k))

    @property
    def H(self) -> "FockOperator":
        return self._new(self.matrix.conj().T)

    adjoint = H

    def norm(self) -> float:
        """Operator norm (largest singular value)."""
        if self.dim == 0:
            return 0.0
        return float(np.linalg.norm(self.matrix, 2))

    def cumulative_projector(self, n: int) -> np.ndarray:
        """Diagonal of ``1_n`` in this operator's index space."""
        return (self.row_sectors <= n).astype(float)

    def compress(self, n: int) -> "FockOperator":
        """``1_n T 1_n`` on the same basis."""
        p = self.cumulative_projector(n)
        return self._new(p[:, None] * self.matrix * p[None, :])

    def restrict_columns(self, n: int) -> "FockOperator":
        """``T 1_n``: the operator restricted to the range of ``1_n``."""
        p = self.cumulative_projector(n)
        return self._new(self.matrix * p[None, :])

    def expm_hermitian(self, t: complex = 1j) -> "FockOperator":
        """``exp(t T)`` for Hermitian ``T``, through its eigendecomposition."""
        if not self.is_hermitian:
            raise ValueError("expm_hermitian needs a Hermitian operator")
        return self._new(expm_h(self.matrix, t))

    def allclose(self, other: "FockOperator", atol: float = 1e-12) -> bool:
        self._check(other)
        return float(np.max(np.abs(self.matrix - other.matrix), initial=0.0)) <= atol

    def __repr__(self):
        return f"FockOperator({self.basis!r}, ell={self.ell}, shift={self.sector_shift})"


def expm_h(m: np.ndarray, t: complex) -> np.ndarray:
    """``exp(t M)`` for a Hermitian matrix ``M``."""
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    return (v * np.exp(t * w)[None, :]) @ v.conj().T


def defect(a, b) -> float:
    """Operator-norm distance between two matrices or operators."""
    a = a.matrix if isinstance(a, FockOperator) else np.asarray(a)
    b = b.matrix if isinstance(b, FockOperator) else np.asarray(b)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a - b, 2))
