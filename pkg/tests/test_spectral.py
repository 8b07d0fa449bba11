import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockmorph import hamiltonians as ham
from fockmorph import spectral as sp
from fockmorph.fock_core import Statistics
from fockmorph.verify import cutoff_polynomial_spec, weak_coupling_spec

from conftest import rherm, rmat


def test_eigh_residual_and_orthonormality(rng):
    h = rherm(rng, 12)
    dec = sp.eigh(h)
    assert dec.residual < 1e-12 and dec.gram_defect < 1e-12
    assert np.all(np.diff(dec.eigenvalues) >= 0)


def test_eigh_is_deterministic_on_degenerate_spaces(rng):
    # two different eigenbases of the same operator give the same canonical output
    q1, _ = np.linalg.qr(rmat(rng, 6))
    w = np.array([1.0, 1.0, 1.0, 2.0, 3.0, 3.0])
    h1 = (q1 * w) @ q1.conj().T
    u = np.eye(6, dtype=complex)
    u[:3, :3], _ = np.linalg.qr(rmat(rng, 3))
    u[4:, 4:], _ = np.linalg.qr(rmat(rng, 2))
    h2 = (q1 @ u * w) @ (q1 @ u).conj().T
    d1, d2 = sp.eigh(h1), sp.eigh(h2)
    assert np.allclose(d1.eigenvalues, d2.eigenvalues)
    assert np.allclose(d1.eigenvectors, d2.eigenvectors, atol=1e-8)
    assert np.array_equal(sp.eigh(h1).eigenvectors, d1.eigenvectors)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValueError):
        sp.eigh(np.array([[0, 1], [0, 0]]))


def test_spectrum_set_operations():
    s = sp.SpectrumSet.from_values([1.0, 1.0 + 1e-12, 2.0])
    assert list(s.points) == pytest.approx([1.0, 2.0]) and list(s.multiplicities) == [2, 1]
    assert s.contains(2.0) and not s.contains(1.5)
    assert s.distance(1.4) == pytest.approx(0.4)
    t = s.union(sp.SpectrumSet.from_values([3.0]))
    assert s.subset_of(t, 1e-9) and not t.subset_of(s, 1e-9)
    assert s.shifted(1.0).approx_equal(sp.SpectrumSet.from_values([2.0, 3.0]), 1e-12)
    half = sp.SpectrumSet.from_values([], intervals=[(0.5, np.inf)])
    assert half.contains(1e6) and half.min == 0.5
    with pytest.raises(ValueError):
        sp.SpectrumSet.empty().min


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=5), st.lists(st.floats(-5, 5), min_size=1, max_size=5))
def test_minkowski_sum_matches_brute_force(a, b):
    s = sp.minkowski_sum(sp.SpectrumSet.from_values(a), sp.SpectrumSet.from_values(b))
    brute = sp.SpectrumSet.from_values([x + y for x, y in itertools.product(a, b)])
    assert s.approx_equal(brute, 1e-6)
    assert s.multiplicities.sum() == len(a) * len(b)


def test_minkowski_power():
    s = sp.SpectrumSet.from_values([1.0, 2.0])
    assert sp.minkowski_power(s, 3).approx_equal(sp.SpectrumSet.from_values([3, 4, 5, 6]), 1e-12)
    with pytest.raises(ValueError):
        sp.minkowski_power(s, 0)


def test_free_field_essential_spectrum_by_enumeration():
    spec = ham.QfhSpec(Statistics.BOSON, 2, 3, np.diag([1.0, 2.0]))
    rep = sp.hvz_essential_spectrum(spec)
    lower = [a + 2 * b for a in range(3) for b in range(3) if a + b <= 2]
    brute = sp.SpectrumSet.from_values([x + y for x in (1.0, 2.0) for y in lower])
    assert rep.result.approx_equal(brute, 1e-12)
    assert rep.to_dict()["method"] == "hvz_recursion"


def test_witness_route_agrees_with_recursion():
    spec = cutoff_polynomial_spec()
    rep = sp.morphism_spectrum_check(spec, 1.4)
    assert rep.defect <= 1e-9 and rep.invariance_defect <= 1e-12 and rep.isometry_defect <= 1e-12
    assert rep.restricted.size == ham.descend(spec).basis.dim


def test_witness_rejects_coupled_probe_and_odd_fermions():
    spec = cutoff_polynomial_spec()
    with pytest.raises(ValueError):
        sp.morphism_spectrum_check(spec)
    u = np.array([0.3, 0.2, 0.0])
    f = ham.QfhSpec(Statistics.FERMION, 3, 2, np.eye(3), ham.PolynomialField(((1.0, (u,)),)))
    with pytest.raises(ValueError):
        sp.morphism_spectrum_check(f, 1.0)


def test_hvz_chain_second_level():
    spec = ham.QfhSpec(Statistics.BOSON, 2, 3, np.diag([1.0, 2.0]))
    chain = sp.hvz_chain(spec, 2)
    lower = [0.0, 1.0, 2.0]
    brute = sp.SpectrumSet.from_values([a + b + c for a in (1, 2) for b in (1, 2) for c in lower])
    assert chain.approx_equal(brute, 1e-12)


def test_fibered_union_is_union_of_fibers():
    grid = np.linspace(0, 1, 5)
    fam = lambda p: np.array([[np.sqrt(p ** 2 + 1)]])  # noqa: E731
    u = np.array([0.2])
    inter = ham.PolynomialField(((1.0, (u, u)),))
    rep = sp.fibered_union(fam, grid, inter, 2, jobs=2)
    manual = None
    for p in grid:
        s = sp.hvz_essential_spectrum(ham.QfhSpec(Statistics.BOSON, 1, 2, fam(p), inter)).result
        manual = s if manual is None else manual.union(s)
    assert rep.result.approx_equal(manual, 1e-12)
    assert rep.provenance["grid_approximation"]
    with pytest.raises(ValueError):
        sp.fibered_union(fam, [], inter, 2)


def test_ground_state_gap_free_and_weak():
    m = 0.7
    free = ham.QfhSpec(Statistics.BOSON, 3, 3, np.diag([m, 1.2, 2.0]), mass=m)
    g = sp.ground_state_report(ham.build_qfh(free), sp.hvz_essential_spectrum(free).result, m)
    assert g.gap == pytest.approx(m, abs=1e-12) and g.multiplicity == 1 and g.isolated
    weak = weak_coupling_spec(m)
    gw = sp.ground_state_report(ham.build_qfh(weak), sp.hvz_essential_spectrum(weak).result, m)
    # compression monotonicity: at finite cutoff the gap can exceed m by E_{N-1} - E_N >= 0
    assert 0 < gw.gap <= m + 1e-9


def test_gap_violation_raised():
    with pytest.raises(sp.GapViolation):
        sp.ground_state_report(np.diag([1.0, 2.0]), sp.SpectrumSet.from_values([0.5]), mass=1.0)
