from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockmorph.fock_core import (InadmissibleState, ProjectorKind, Statistics, build_basis, index_state,
                                 sector_projector, sector_size, state_index)


@pytest.mark.parametrize("d,n", [(1, 4), (2, 3), (3, 4), (4, 2)])
def test_boson_sector_sizes_are_binomial(d, n):
    b = build_basis(d, n, "boson")
    assert b.sector_sizes == [comb(k + d - 1, d - 1) for k in range(n + 1)]
    assert b.dim == comb(n + d, d)


@pytest.mark.parametrize("d", [1, 3, 5])
def test_fermion_full_space_has_dimension_two_to_d(d):
    b = build_basis(d, d, Statistics.FERMION)
    assert b.dim == 2 ** d
    assert b.sector_sizes == [comb(d, k) for k in range(d + 1)]


def test_basis_order_is_sector_major_with_vacuum_first():
    b = build_basis(2, 2)
    assert [s.occupations for s in b.states] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert list(b.particle_numbers) == [0, 1, 1, 2, 2, 2]


@given(st.integers(1, 4), st.integers(0, 4), st.sampled_from(["boson", "fermion"]))
def test_index_is_a_bijection(d, n, stats):
    if stats == "fermion" and n > d:
        return
    b = build_basis(d, n, stats)
    for i, s in enumerate(b.states):
        assert state_index(b, s) == i
        assert index_state(b, i) == s
    assert len({s.occupations for s in b.states}) == b.dim


@pytest.mark.parametrize("occ,stats", [((2, 0), "fermion"), ((-1, 0), "boson"), ((2, 2), "boson"), ((1,), "boson")])
def test_inadmissible_states_are_rejected(occ, stats):
    b = build_basis(2, 3 if stats == "boson" else 2, stats)
    with pytest.raises(InadmissibleState):
        b.index(occ)


def test_invalid_construction():
    with pytest.raises(ValueError):
        build_basis(0, 2)
    with pytest.raises(ValueError):
        build_basis(2, -1)
    with pytest.raises(ValueError):
        build_basis(2, 3, "fermion")
    with pytest.raises(ValueError):
        build_basis(2, 2, "anyon")
    with pytest.raises(IndexError):
        build_basis(2, 2).state(99)


def test_sector_projectors_resolve_identity():
    b = build_basis(3, 3)
    single = [sector_projector(b, n).matrix for n in range(4)]
    assert np.allclose(sum(single), np.eye(b.dim))
    for n in range(4):
        cum = sector_projector(b, n, ProjectorKind.CUMULATIVE).matrix
        assert np.allclose(cum, sum(single[: n + 1]))
        assert np.allclose(single[n] @ single[n], single[n])
    with pytest.raises(ValueError):
        sector_projector(b, 4)


def test_sector_size_helper_matches_basis():
    for d in (2, 3):
        b = build_basis(d, d, "fermion")
        assert [sector_size(d, n, Statistics.FERMION) for n in range(d + 1)] == b.sector_sizes


def test_ladder_matches_occupation_arithmetic():
    # a*(e_j)|n> = sqrt(n_j + 1)|n + e_j> for bosons; sign (-1)^{#occupied before j} for fermions
    for stats in ("boson", "fermion"):
        b = build_basis(3, 3, stats)
        lad = b.ladder()
        for j in range(3):
            dense = lad[j].toarray()
            expect = np.zeros_like(dense)
            for col, s in enumerate(b.states):
                occ = list(s.occupations)
                if sum(occ) == b.n_max or (stats == "fermion" and occ[j]):
                    continue
                val = np.sqrt(occ[j] + 1) if stats == "boson" else (-1) ** sum(occ[:j])
                occ[j] += 1
                expect[b.index(occ), col] = val
            assert np.array_equal(dense, expect)


def test_sub_basis_embedding():
    big, small = build_basis(3, 3), build_basis(2, 2)
    idx = big.sub_basis_embedding(small)
    for i, s in enumerate(small.states):
        assert big.state(idx[i]).occupations == s.occupations + (0,)
    with pytest.raises(ValueError):
        small.sub_basis_embedding(big)


def test_basis_equality_and_hash():
    assert build_basis(2, 2) == build_basis(2, 2, Statistics.BOSON)
    assert hash(build_basis(2, 2)) == hash(build_basis(2, 2))
    assert build_basis(2, 2) != build_basis(2, 2, "fermion")
