import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockmorph import morphism as mor
from fockmorph import operators as ops
from fockmorph.fock_core import build_basis, sector_projector
from fockmorph.fockop import FockOperator, defect
from fockmorph.verify import random_canonical_word

from conftest import rmat, rvec


def probe_free(u):
    return np.r_[u, 0]


def test_field_image_is_field_on_probe_free_space(rng):
    # a(e) phi(u) a*(e) = phi(u) on probe-free states when u is orthogonal to e
    b = build_basis(3, 4)
    u = probe_free(rvec(rng, 2))
    num = mor.numeric_morphism(ops.field(b, u), b)
    sub = mor.probe_free_basis(b, 2)
    assert sub.d == 2 and sub.n_max == 3
    assert defect(num, ops.field(sub, u[:2])) < 1e-12


def test_gamma_image_picks_probe_diagonal(rng):
    b = build_basis(3, 4)
    a = np.zeros((3, 3), dtype=complex)
    a[:2, :2] = rmat(rng, 2, 0.7)
    a[2, 2] = 0.4 - 0.2j
    num = mor.numeric_morphism(ops.gamma(b, a), b)
    sub = mor.probe_free_basis(b, 2)
    assert defect(num, a[2, 2] * ops.gamma(sub, a[:2, :2]).matrix) < 1e-12
    img = mor.canonical_image(mor.word(mor.Gamma(a)))
    assert np.allclose(img.one_particle_part, a)


def test_number_functions_shift_and_die():
    img = mor.canonical_image(mor.word(mor.NumberFunction([1.0, 2.0, 3.0])))
    (term,) = img.terms
    assert np.allclose(term.word.factors[0].samples, [2.0, 3.0])
    assert mor.canonical_image(mor.word(mor.NumberFunction([5.0]))).is_zero
    assert mor.canonical_image(mor.word(mor.SectorProj(0))).is_zero
    (t2,) = mor.canonical_image(mor.word(mor.SectorProj(3))).terms
    assert t2.word.factors[0] == mor.SectorProj(2)
    for n in range(5):
        assert mor.decay_check(mor.word(mor.NumberFunction(np.ones(n + 1)))) == n + 1
    assert mor.decay_check(mor.word(mor.FieldPower(np.ones(2), 1)), max_iter=5) is None


def test_sector_projector_maps_down_one(rng):
    b = build_basis(3, 4)
    for n in range(1, 5):
        num = mor.numeric_morphism(sector_projector(b, n), b)
        assert defect(num, sector_projector(num.basis, n - 1)) < 1e-14


def test_noncanonical_words_rejected():
    g = mor.Gamma(0.5 * np.eye(2))
    f = mor.FieldPower(np.ones(2))
    assert not mor.word(g, f).is_canonical()
    with pytest.raises(mor.NotCanonical):
        mor.canonical_image(mor.word(g, f))
    with pytest.raises(mor.NotCanonical):
        mor.canonical_image(mor.word(mor.NumberFunction([1.0]), f))
    with pytest.raises(mor.NotCanonical):
        mor.canonical_image(mor.word(g, g))
    assert mor.word(mor.Scalar(2.0), f, mor.Scalar(1j), g, mor.SectorProj(1)).is_canonical()


def test_factor_validation():
    with pytest.raises(ValueError):
        mor.Gamma(np.eye(2))
    with pytest.raises(ValueError):
        mor.FieldPower(np.ones(2), -1)


def test_probe_in_support_rejected():
    b = build_basis(3, 3)
    w = mor.word(mor.FieldPower(np.array([0, 0, 1.0])))
    with pytest.raises(mor.SupportError):
        mor.numeric_morphism_element(w, b)


@pytest.mark.parametrize("fermion", [False, True])
def test_symbolic_and_numeric_routes_agree(fermion, rng):
    b = build_basis(4, 4, "fermion" if fermion else "boson")
    for _ in range(30):
        w = random_canonical_word(rng, 3, fermion)
        assert mor.morphism_exactness_defect(w, b) <= 1e-10


def test_fermionic_odd_word_needs_the_grading(rng):
    b = build_basis(4, 4, "fermion")
    w = mor.word(mor.FieldPower(probe_free(rvec(rng, 3)), 1))
    assert mor.morphism_exactness_defect(w, b) < 1e-12
    assert mor.morphism_exactness_defect(w, b, use_grading=False) > 1e-3


@pytest.mark.parametrize("stats", ["boson", "fermion"])
def test_probe_free_finite_rank_is_in_the_kernel(stats, rng):
    b = build_basis(4, 4, stats)
    free = (b.occupations[:, -1] == 0).astype(float)
    r = rmat(rng, b.dim) * free[:, None] * free[None, :]
    assert mor.numeric_morphism(FockOperator(b, r), b).norm() <= 1e-12


def test_linearity_of_elements(rng):
    b = build_basis(3, 4)
    w1 = mor.word(mor.FieldPower(probe_free(rvec(rng, 2)), 2))
    w2 = mor.word(mor.Gamma(np.diag([0.3, 0.5, 0.2])), mor.NumberFunction([1, 2, 3]))
    el = mor.AlgebraElement.of(w1, 2.0) + mor.AlgebraElement.of(w2, -1j)
    lhs = mor.numeric_morphism_element(el, b)
    rhs = 2.0 * mor.numeric_morphism_element(w1, b).matrix - 1j * mor.numeric_morphism_element(w2, b).matrix
    assert defect(lhs, rhs) < 1e-12
    assert mor.morphism_exactness_defect(el, b) < 1e-12


@given(st.integers(1, 2), st.integers(1, 2), st.integers(0, 10 ** 6))
def test_multiplicative_on_field_words(k1, k2, seed):
    rng = np.random.default_rng(seed)
    b = build_basis(3, 5)
    t1 = mor.evaluate(mor.word(mor.FieldPower(probe_free(rvec(rng, 2)), k1)), b)
    t2 = mor.evaluate(mor.word(mor.FieldPower(probe_free(rvec(rng, 2)), k2)), b)
    assert mor.morphism_multiplicativity_check(t1, t2, deg=2) <= 1e-10


def test_iterated_morphism_tracks_one_particle_factors(rng):
    a = np.diag([0.2, 0.5, 0.6, 0.7]).astype(complex)
    el = mor.word(mor.Gamma(a), mor.NumberFunction([1.0, 1.0, 1.0, 1.0]))
    chain = mor.iterate_morphism(el, 2)
    assert len(chain[1].terms[0].one_particle) == 2
    b = build_basis(4, 4)
    num = mor.iterate_numeric(mor.word(mor.Gamma(np.diag([0.2, 0.5, 0.6, 0.7]))), b, 2)
    sub = num[-1].basis
    assert sub.d == 2 and sub.n_max == 2
    assert defect(num[-1], 0.7 * 0.6 * ops.gamma(sub, np.diag([0.2, 0.5])).matrix) < 1e-12
