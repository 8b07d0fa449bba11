import numpy as np
import pytest

from fockmorph import hamiltonians as ham
from fockmorph import mourre as mo
from fockmorph import operators as ops
from fockmorph import spectral as sp
from fockmorph.fock_core import build_basis
from fockmorph.verify import pauli_fierz_desk, tensor_rho_defect, threshold_law

from conftest import rherm

SX = np.array([[0, 1], [1, 0]], dtype=complex)


def test_rho_two_level_by_hand():
    h = np.diag([0.0, 1.0])
    # [H, iA] = i(HA - AH) = [[0, -i], [i, 0]], eigenvalues -1 and 1
    c = mo.commutator(h, SX)
    assert np.allclose(c, [[0, -1j], [1j, 0]])
    assert mo.rho(h, SX, 0.0, 0.1) == pytest.approx(0.0)
    assert mo.rho(h, SX, 0.5, 0.6) == pytest.approx(-1.0)
    assert mo.rho(h, SX, 5.0, 0.1) == np.inf
    with pytest.raises(ValueError):
        mo.rho(h, SX, 0.0, 0.0)


def test_windowed_commutator_is_traceless(rng):
    h, a = rherm(rng, 8), rherm(rng, 8)
    w = np.linalg.eigvalsh(h)
    for lam in w:
        assert abs(mo.window_trace(h, a, lam, 0.3)) < 1e-12
        assert mo.rho(h, a, lam, 0.3) <= 1e-12


def test_lifted_commutator(rng):
    b = build_basis(4, 4)
    assert mo.lifted_commutator_defect(b, rherm(rng, 4), rherm(rng, 4)) <= 1e-12


def test_conjugate_operator_requires_hermitian():
    b = build_basis(2, 2)
    assert mo.conjugate_operator(b, SX).A.is_hermitian
    with pytest.raises(ValueError):
        mo.conjugate_operator(b, np.array([[0, 1], [0, 0]]))


def test_tensor_rho_formula(rng):
    assert tensor_rho_defect(rng) <= 1e-8


def test_theoretical_thresholds_by_enumeration():
    tau = sp.SpectrumSet.from_values([1.0, 2.5])
    eig = sp.SpectrumSet.from_values([0.0, 0.3])
    th = mo.thresholds_theoretical(tau, eig, 2)
    brute = {t + e for t in (1.0, 2.5) for e in (0.0, 0.3)} | \
        {t1 + t2 + e for t1 in (1.0, 2.5) for t2 in (1.0, 2.5) for e in (0.0, 0.3)}
    assert th.points.approx_equal(sp.SpectrumSet.from_values(sorted(brute)), 1e-12)
    levels = [sp.SpectrumSet.from_values([0.0]), sp.SpectrumSet.from_values([0.0, 1.1])]
    cut = mo.thresholds_cutoff(sp.SpectrumSet.from_values([1.0]), levels, 2)
    # k=1: 1 + {0, 1.1}; k=2: 2 + {0}
    assert cut.points.approx_equal(sp.SpectrumSet.from_values([1.0, 2.1, 2.0]), 1e-12)
    with pytest.raises(ValueError):
        mo.thresholds_cutoff(tau, levels[:1], 2)


def test_numeric_thresholds_and_delta():
    h = np.diag([0.0, 1.0])
    prof = mo.rho_profile(h, SX, np.linspace(-0.5, 1.5, 21), 0.05, jobs=2)
    ts = mo.thresholds_numeric(prof)
    assert ts.delta == pytest.approx(1e-6 * prof.commutator_norm)
    assert ts.points.subset_of(sp.SpectrumSet.from_values([0.0, 1.0]), 0.05 + 1e-9)
    with pytest.raises(ValueError):
        mo.thresholds_numeric(prof, -1.0)


def test_one_particle_thresholds_flat_dispersion(rng):
    tau = mo.one_particle_thresholds(np.eye(3), rherm(rng, 3), 0.05)
    assert tau.approx_equal(sp.SpectrumSet.from_values([1.0]), 0.05)


def test_threshold_lattice_law(rng):
    law = threshold_law(rng)
    assert law["tau_is_m"] and law["theory_in_numeric"] and law["numeric_in_theory_pp"]


def test_virial_pauli_fierz():
    spec, a = pauli_fierz_desk()
    h = ham.build_pauli_fierz(spec)
    big_a = np.kron(ops.dgamma(spec.basis, a).matrix, np.eye(spec.ell))
    assert mo.virial_check(h, big_a) <= 1e-10
