"""Truncated symmetric and antisymmetric Fock bases.

States are ordered sector by sector (total particle number ``0..n_max``).
Inside a sector the order is that of
:func:`itertools.combinations_with_replacement` (bosons) or
:func:`itertools.combinations` (fermions) over the list of occupied modes,
which is descending lexicographic order of the occupation vectors. Index 0
is always the vacuum.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels


class Statistics(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @classmethod
    def parse(cls, value) -> "Statistics":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown statistics {value!r}; use 'boson' or 'fermion'") from None


class InadmissibleState(ValueError):
    """An occupation vector that does not belong to a given basis."""


@dataclass(frozen=True)
class OccupationState:
    occupations: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.occupations)

    def __iter__(self):
        return iter(self.occupations)

    def __len__(self):
        return len(self.occupations)


def sector_size(d: int, n: int, statistics: Statistics) -> int:
    if statistics is Statistics.FERMION:
        return comb(d, n)
    return comb(n + d - 1, d - 1)


class FockBasis:
    """Occupation-number basis of ``Γ_{n_max}`` over ``d`` modes.

    Instances are immutable; the per-mode creation matrices are built once
    on first use and shared.
    """

    def __init__(self, d: int, n_max: int, statistics: Statistics):
        self._d = d
        self._n_max = n_max
        self._statistics = statistics
        fermion = statistics is Statistics.FERMION
        rows = []
        offsets = [0]
        for n in range(n_max + 1):
            combos = itertools.combinations(range(d), n) if fermion else \
                itertools.combinations_with_replacement(range(d), n)
            for modes in combos:
                occ = [0] * d
                for j in modes:
                    occ[j] += 1
                rows.append(occ)
            offsets.append(len(rows))
        occ = np.array(rows, dtype=np.int64).reshape(len(rows), d)
        occ.setflags(write=False)
        self._occ = occ
        self._offsets = tuple(offsets)
        self._offsets_arr = np.array(offsets, dtype=np.int64)
        self._table = _kernels.count_table(d, n_max, fermion)
        numbers = occ.sum(axis=1)
        numbers.setflags(write=False)
        self._numbers = numbers
        self._ladder = None

    # -- basic data --------------------------------------------------------
    @property
    def d(self) -> int:
        return self._d

    @property
    def n_max(self) -> int:
        return self._n_max

    @property
    def statistics(self) -> Statistics:
        return self._statistics

    @property
    def is_fermionic(self) -> bool:
        return self._statistics is Statistics.FERMION

    @property
    def dim(self) -> int:
        return self._occ.shape[0]

    @property
    def occupations(self) -> np.ndarray:
        """Read-only ``(dim, d)`` integer array of occupation vectors."""
        return self._occ

    @property
    def particle_numbers(self) -> np.ndarray:
        return self._numbers

    @property
    def sector_offsets(self) -> tuple[int, ...]:
        """Start index of each sector; the final entry equals :attr:`dim`."""
        return self._offsets

    @property
    def sector_sizes(self) -> list[int]:
        o = self._offsets
        return [o[n + 1] - o[n] for n in range(self._n_max + 1)]

    def sector_slice(self, n: int) -> slice:
        if not 0 <= n <= self._n_max:
            raise ValueError(f"sector {n} outside 0..{self._n_max}")
        return slice(self._offsets[n], self._offsets[n + 1])

    @property
    def states(self) -> list[OccupationState]:
        return [OccupationState(tuple(int(v) for v in row)) for row in self._occ]

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, FockBasis):
            return NotImplemented
        return (self._d, self._n_max, self._statistics) == (other._d, other._n_max, other._statistics)

    def __hash__(self):
        return hash((self._d, self._n_max, self._statistics))

    def __repr__(self):
        return (f"FockBasis(d={self._d}, n_max={self._n_max}, "
                f"statistics={self._statistics.value}, dim={self.dim})")

    # -- indexing ----------------------------------------------------------
    def check_state(self, occupations) -> np.ndarray:
        occ = np.asarray(tuple(occupations), dtype=np.int64)
        if occ.shape != (self._d,):
            raise InadmissibleState(f"expected {self._d} occupations, got {occ.shape[0] if occ.ndim else 0}")
        for j, v in enumerate(occ):
            if v < 0:
                raise InadmissibleState(f"negative occupation {v} in mode {j}")
            if self.is_fermionic and v > 1:
                raise InadmissibleState(f"fermionic occupation {v} > 1 in mode {j}")
        total = int(occ.sum())
        if total > self._n_max:
            raise InadmissibleState(
                f"total particle number {total} exceeds cutoff {self._n_max} (mode {int(np.argmax(occ))} largest)")
        return occ

    def index(self, state) -> int:
        occ = self.check_state(state)
        return int(_kernels.rank_state(occ, self._offsets_arr, self._table, self.is_fermionic))

    def state(self, index: int) -> OccupationState:
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} outside basis of dimension {self.dim}")
        return OccupationState(tuple(int(v) for v in self._occ[index]))

    # -- derived objects ---------------------------------------------------
    def ladder(self) -> list:
        """Per-mode creation matrices ``a*(e_j)`` as scipy CSR arrays."""
        if self._ladder is None:
            from scipy import sparse

            modes, rows, cols, vals = _kernels.ladder_entries(
                self._occ, self._offsets_arr, self._table, self.is_fermionic, self._n_max)
            mats = []
            for j in range(self._d):
                sel = modes == j
                mats.append(sparse.csr_array(
                    (vals[sel], (rows[sel], cols[sel])), shape=(self.dim, self.dim)))
            self._ladder = mats
        return self._ladder

    def sub_basis_embedding(self, other: "FockBasis") -> np.ndarray:
        """Indices in ``self`` of the states of ``other`` padded with empty modes.

        ``other`` must have the same statistics, ``other.d <= self.d`` and
        ``other.n_max <= self.n_max``; its modes are identified with the first
        ``other.d`` modes of ``self``.
        """
        if other.statistics is not self.statistics or other.d > self.d or other.n_max > self.n_max:
            raise ValueError(f"{other!r} does not embed in {self!r}")
        pad = np.zeros((other.dim, self.d - other.d), dtype=np.int64)
        occ = np.hstack([other.occupations, pad])
        return np.array([_kernels.rank_state(row, self._offsets_arr, self._table, self.is_fermionic)
                         for row in occ], dtype=np.int64)


def build_basis(d: int, n_max: int, statistics=Statistics.BOSON) -> FockBasis:
    """Enumerate the truncated Fock basis over ``d`` modes with at most ``n_max`` particles."""
    statistics = Statistics.parse(statistics)
    if int(d) != d or d < 1:
        raise ValueError(f"one-particle dimension must be a positive integer, got {d}")
    if int(n_max) != n_max or n_max < 0:
        raise ValueError(f"particle cutoff must be a nonnegative integer, got {n_max}")
    if statistics is Statistics.FERMION and n_max > d:
        raise ValueError(f"fermionic cutoff {n_max} exceeds the number of modes {d}")
    return FockBasis(int(d), int(n_max), statistics)


def state_index(basis: FockBasis, state) -> int:
    return basis.index(state)


def index_state(basis: FockBasis, index: int) -> OccupationState:
    return basis.state(index)


class ProjectorKind(enum.Enum):
    SINGLE = "single"          # onto sector n
    CUMULATIVE = "cumulative"  # onto sectors 0..n


def sector_projector(basis: FockBasis, n: int, kind=ProjectorKind.SINGLE):
    """Diagonal 0/1 projector onto sector ``n`` or onto all sectors up to ``n``."""
    from .fockop import FockOperator

    kind = ProjectorKind(kind) if not isinstance(kind, ProjectorKind) else kind
    if not 0 <= n <= basis.n_max:
        raise ValueError(f"sector {n} outside 0..{basis.n_max}")
    nums = basis.particle_numbers
    diag = (nums == n) if kind is ProjectorKind.SINGLE else (nums <= n)
    return FockOperator(basis, np.diag(diag.astype(np.complex128)))
