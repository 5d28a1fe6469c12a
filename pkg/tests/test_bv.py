import random

import pytest
from hypothesis import given

from oddsymp import bv
from oddsymp.calculus import bv_laplacian, darboux_theta, exterior_d, omega
from oddsymp.geometry import Chart, GeometricObject, make_diffeo, make_fiber_shift, make_identity, pullback
from oddsymp.grassmann import Gaussian, Kind, ParityError, SuperPolynomial
from oddsymp.randgen import (
    BASE_FORM_KINDS,
    FORM_KINDS,
    FUNCTION_KINDS,
    random_admissible_form,
    random_poly,
    random_transformation,
    random_triangular_diffeo,
)
from tests.strategies import seeds

C1 = Chart(1, 2)
C2 = Chart(2, 2)


def p1(t):
    return C1.poly(t)


def p2(t):
    return C2.poly(t)


def dens(t, ch=C1):
    return GeometricObject.density(ch, t)


def setup(seed, n_max=3):
    rng = random.Random(seed)
    ch = Chart(rng.randint(1, n_max), 2)
    return rng, ch, ch.gens


def homog(rng, gens, deg=2):
    return random_poly(rng, gens, FUNCTION_KINDS, 3, deg, parity=rng.randint(0, 1))


@pytest.mark.parametrize("s, want", [("7", "0"), ("x1*xi1", "1"), ("x1^2*xi1 + x1", "2*x1")])
def test_delta_examples(s, want):
    assert bv.delta_half_density(dens(s)).body == p1(want)
    assert bv.divergence(dens(s)).body == p1(want)


def test_delta_wrong_kind():
    with pytest.raises(bv.WrongKind):
        bv.delta_half_density(GeometricObject.form(C1, "dx1"))


def test_bracket_examples():
    assert bv.odd_bracket(p2("x1"), p2("xi1")) == p2("1")
    assert bv.odd_bracket(p2("x1"), p2("x2")).is_zero
    with pytest.raises(ParityError):
        bv.odd_bracket(p2("x1 + xi1"), p2("x2"))


def test_hamiltonian_field_acts_by_bracket():
    f = p2("x1*xi2*th1")
    g = p2("x2^2*xi1")
    X = bv.hamiltonian_vector_field(f)
    assert X(g) == bv.odd_bracket(f, g)
    # a derivation of parity |f| + 1 = 0
    h = p2("xi2 + x1*th2")
    assert X(g * h) == X(g) * h + g * X(h)


@given(seeds)
def test_bracket_parity_and_symmetry(seed):
    rng, ch, gens = setup(seed)
    f, g = homog(rng, gens), homog(rng, gens)
    b = bv.odd_bracket(f, g)
    if b:
        assert b.parity() == (f.parity() + g.parity() + 1) % 2
    sign = -((-1) ** ((f.parity() + 1) * (g.parity() + 1)))
    assert b == sign * bv.odd_bracket(g, f)


@given(seeds)
def test_bracket_jacobi(seed):
    rng, ch, gens = setup(seed)
    a, b, c = (homog(rng, gens) for _ in range(3))
    pa, pb = a.parity() + 1, b.parity() + 1
    br = bv.odd_bracket
    assert br(a, br(b, c)) == br(br(a, b), c) + (-1) ** (pa * pb) * br(b, br(a, c))


def test_laplacian_with_volume_examples():
    rho = GeometricObject.volume(C1)
    assert bv.laplacian_with_volume(p1("x1*xi1"), rho) == p1("1")
    assert bv.laplacian_with_volume(p1("5"), rho).is_zero
    with pytest.raises(ValueError):
        GeometricObject.volume(C1, p1("th1*th2"))


def test_laplacian_with_volume_correction():
    # Delta_rho = Delta + 1/2 {log rho, -}, with log rho = x1^2 th1 th2 here
    rho = GeometricObject.volume(C1, p1("1 + x1^2*th1*th2"))
    assert bv.laplacian_with_volume(p1("x1*xi1"), rho) == p1("1 + x1^2*th1*th2")


@given(seeds)
def test_laplacian_with_volume_darboux(seed):
    rng, ch, gens = setup(seed)
    f = random_poly(rng, gens, FUNCTION_KINDS, 4, 3)
    assert bv.laplacian_with_volume(f, GeometricObject.volume(ch)) == bv_laplacian(f)


@given(seeds)
def test_laplacian_with_volume_leibniz_defect(seed):
    rng, ch, gens = setup(seed, 2)
    f, g = homog(rng, gens), homog(rng, gens)
    extra = random_poly(rng, gens, FUNCTION_KINDS, 2, 2, parity=0, nonzero=False).filter(lambda k: k[1])
    rho = GeometricObject.volume(ch, 1 + extra)
    L = lambda v: bv.laplacian_with_volume(v, rho)  # noqa: E731
    sg = -1 if f.parity() else 1
    assert L(f * g) - L(f) * g - sg * (f * L(g)) == sg * bv.odd_bracket(f, g)


def test_master_predicate_examples():
    rho = GeometricObject.volume(C1)
    assert bv.master_predicate(rho, p1("0"))
    assert bv.master_predicate(rho, p1("6*th1*th2"))
    # frozen: Delta exp(x1 xi1 th1) = th1
    assert not bv.master_predicate(rho, p1("2*x1*xi1*th1"))
    with pytest.raises(ParityError):
        bv.master_predicate(rho, p1("2*x1*xi1*th1*th2"))
    with pytest.raises(ValueError):
        bv.master_predicate(rho, p1("x1"))


def test_de_rham_examples():
    assert exterior_d(p1("x1")) == p1("dx1")
    assert exterior_d(p1("x1*xi1")) == p1("dx1*xi1 + x1*dxi1")


def test_theta_is_primitive_of_omega():
    assert exterior_d(darboux_theta(C2.gens)) == omega(C2.gens)


@pytest.mark.parametrize("s", ["1", "dx1*dxi1", "x1*xi1*dx1 + th1*dxi1^2"])
def test_theta_conjugation_examples(s):
    assert bv.theta_conjugation_check(p1(s))


@given(seeds)
def test_nilpotency(seed):
    rng, ch, gens = setup(seed)
    w = random_poly(rng, gens, FORM_KINDS, 4, 4)
    s = random_poly(rng, gens, FUNCTION_KINDS, 4, 4)
    assert exterior_d(exterior_d(w)).is_zero
    assert bv.D_total(bv.D_total(w)).is_zero
    assert (omega(gens) * (omega(gens) * w)).is_zero
    assert bv_laplacian(bv_laplacian(s)).is_zero
    assert bv.theta_conjugation_check(w)


def test_homotopy_examples():
    assert bv.homotopy_H(p1("1")).is_zero
    assert bv.homotopy_H(p1("dx1*dxi1")) == p1("1")
    with pytest.raises(bv.InadmissibleForm) as e:
        bv.homotopy_H(p1("dxi1 + x1*dx1"))
    assert e.value.term == p1("x1*dx1")


@given(seeds)
def test_homotopy_identity(seed):
    rng, ch, gens = setup(seed)
    a = random_admissible_form(rng, gens, 4, 4)
    assert bv.homotopy_H(omega(gens) * a) + omega(gens) * bv.homotopy_H(a) == a


def test_interior_product_examples():
    w = p1("x1*dx1 + th1")
    assert bv.interior_product(p1("1"), w) == w
    assert bv.interior_product(p1("xi1"), p1("dx1")) == p1("-i")


@given(seeds)
def test_interior_product_symbol_calculus(seed):
    rng, ch, gens = setup(seed)
    H, G = homog(rng, gens), homog(rng, gens)
    w = random_poly(rng, gens, BASE_FORM_KINDS, 3, 2)
    # symbols multiply: i_H i_G = i_{HG}
    assert bv.interior_product(H, bv.interior_product(G, w)) == bv.interior_product(H * G, w)


def test_lie_density_examples():
    s = p1("x1^3 + 2*x1")
    assert bv.lie_derivative_density(p1("5"), s).is_zero
    assert bv.lie_derivative_density(p1("xi1"), s) == p1("3*x1^2 + 2")


def test_lie_form_example():
    assert bv.lie_derivative_form(p1("xi1"), p1("x1")) == p1("1")


def test_lie_requires_homogeneous():
    with pytest.raises(ParityError):
        bv.lie_derivative_density(p1("xi1 + x1"), p1("x1"))


@given(seeds)
def test_lie_commutes_with_delta_and_d(seed):
    rng, ch, gens = setup(seed)
    H = homog(rng, gens)
    s = random_poly(rng, gens, FUNCTION_KINDS, 3, 3)
    w = random_poly(rng, gens, BASE_FORM_KINDS, 3, 3)
    sign = 1 if H.parity() else -1
    assert bv_laplacian(bv.lie_derivative_density(H, s)) == sign * bv.lie_derivative_density(H, bv_laplacian(s))
    assert exterior_d(bv.lie_derivative_form(H, w)) == sign * bv.lie_derivative_form(H, exterior_d(w))


@given(seeds)
def test_lie_is_bracket_morphism(seed):
    rng, ch, gens = setup(seed)
    H, G = homog(rng, gens), homog(rng, gens)
    B = bv.schouten_bracket(H, G)
    sign = (-1) ** ((H.parity() + 1) * (G.parity() + 1))
    s = random_poly(rng, gens, FUNCTION_KINDS, 3, 2)
    w = random_poly(rng, gens, BASE_FORM_KINDS, 3, 2)
    for L, v in ((bv.lie_derivative_density, s), (bv.lie_derivative_form, w)):
        assert L(B, v) == L(H, L(G, v)) - sign * L(G, L(H, v))


@given(seeds)
def test_classical_cartan(seed):
    rng, ch, gens = setup(seed)
    X = SuperPolynomial.zero(gens)
    for a in range(1, ch.n + 1):
        X = X + random_poly(rng, gens, (Kind.X,), 2, 2) * SuperPolynomial.gen(gens, gens.xi(a))
    w = random_poly(rng, gens, BASE_FORM_KINDS, 3, 3)
    assert bv.lie_derivative_form(X, w) == bv.cartan_lie_derivative(X, w)


def test_fourier_examples():
    assert bv.fourier(p1("1")) == p1("i*dx1")
    assert bv.fourier(p1("xi1")) == p1("1")
    with pytest.raises(ValueError):
        bv.fourier(p1("dx1"))
    with pytest.raises(ValueError):
        bv.inv_fourier(p1("xi1"))


def test_fourier_inverse_constant():
    assert [bv.fourier_inverse_constant(n) for n in (1, 2, 3, 4)] == [Gaussian(0, -1), 1, Gaussian(0, -1), 1]


@given(seeds)
def test_fourier_round_trip_and_intertwining(seed):
    rng, ch, gens = setup(seed)
    s = random_poly(rng, gens, FUNCTION_KINDS, 4, 3)
    H = random_poly(rng, gens, FUNCTION_KINDS, 3, 2)
    i = SuperPolynomial.imag(gens)
    assert bv.inv_fourier(bv.fourier(s)) == s
    assert bv.fourier(bv_laplacian(s)) == i * exterior_d(bv.fourier(s))
    assert bv.fourier(H * s) == bv.interior_product(H, bv.fourier(s))


def test_pullback_via_fourier_examples():
    w = GeometricObject.form(C1, "x1*dx1 + th1")
    assert bv.pullback_form_via_fourier(make_identity(C1), w) == w
    D = make_diffeo(C1, [p1("2*x1")], [p1("1/2*x1")])
    one_form = GeometricObject.form(C1, "dx1")
    assert bv.pullback_form_via_fourier(D, one_form).body == p1("2*dx1") == pullback(D, one_form).body
    S = make_fiber_shift(C1, p1("th1*x1"))
    assert bv.pullback_form_via_fourier(S, GeometricObject.form(C1, "1")).body == p1("1 + i*th1*dx1")


@given(seeds)
def test_pullback_paths_agree_for_diffeos(seed):
    rng, ch, gens = setup(seed, 2)
    F = random_triangular_diffeo(rng, ch)
    w = GeometricObject.form(ch, random_poly(rng, gens, BASE_FORM_KINDS, 3, 3))
    assert bv.pullback_form_via_fourier(F, w).body == pullback(F, w).body


@given(seeds)
def test_pullback_via_fourier_commutes_with_d(seed):
    rng, ch, gens = setup(seed, 2)
    F = random_transformation(rng, ch)
    w = GeometricObject.form(ch, random_poly(rng, gens, BASE_FORM_KINDS, 3, 3))
    dw = w.with_body(exterior_d(w.body))
    assert bv.pullback_form_via_fourier(F, dw).body == exterior_d(bv.pullback_form_via_fourier(F, w).body)


@given(seeds)
def test_delta_invariance(seed):
    rng, ch, gens = setup(seed, 2)
    F = random_transformation(rng, ch)
    sig = GeometricObject.density(ch, random_poly(rng, gens, FUNCTION_KINDS, 4, 3))
    assert bv.delta_half_density(pullback(F, sig)) == pullback(F, bv.delta_half_density(sig))
