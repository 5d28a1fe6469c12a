import random

import pytest
from hypothesis import given

from oddsymp import linalg
from oddsymp.bv import homotopy_H
from oddsymp.calculus import bv_laplacian, exterior_d, omega
from oddsymp.geometry import Chart
from oddsymp.grassmann import Gaussian, SuperPolynomial
from oddsymp.randgen import FORM_KINDS, FUNCTION_KINDS, random_poly
from oddsymp.spectral import (
    E1Class,
    GradedSlice,
    NotClosed,
    SliceNotClosed,
    d1,
    d2,
    delta_cohomology,
    e1_project,
    relation_equations,
    relation_membership,
    top_form,
)
from tests.strategies import seeds

C1 = Chart(1, 1)


def p1(t):
    return C1.poly(t)


def setup(seed, n_max=3):
    rng = random.Random(seed)
    ch = Chart(rng.randint(1, n_max), 2)
    return rng, ch, ch.gens


# exact linear algebra


def test_solve_and_kernel():
    cols = [{"a": Gaussian(1), "b": Gaussian(2)}, {"a": Gaussian(2), "b": Gaussian(4)}, {"b": Gaussian(0, 1)}]
    assert linalg.rank(cols) == 2
    (k,) = linalg.kernel(cols)
    total = {}
    for j, c in k.items():
        for key, v in cols[j].items():
            total[key] = total.get(key, Gaussian()) + c * v
    assert all(not v for v in total.values())
    coeffs = linalg.solve(cols, {"a": Gaussian(3), "b": Gaussian(6, 1)})
    assert coeffs is not None
    assert linalg.solve(cols[:2], {"b": Gaussian(1)}) is None


def test_poly_vector_round_trip():
    g = C1.gens
    p = p1("(2-3*i)*x1*xi1 + i*th1 + 5")
    assert linalg.vector_to_poly(g, linalg.poly_to_vector(p)) == p


# E1 classes


def test_projection_of_top_form():
    ch = Chart(2, 1)
    s = ch.poly("x1*xi2 + th1")
    pr = e1_project(ch, s * top_form(ch.gens))
    assert pr.cls.representative == s and pr.witness.is_zero


def test_projection_drops_dxi_terms():
    pr = e1_project(C1, p1("dx1*(1 + dxi1*x1)"))
    assert pr.cls.representative == p1("1")
    assert p1("dx1") + omega(C1.gens) * pr.witness == p1("dx1*(1 + dxi1*x1)")


def test_projection_rejects_non_closed():
    with pytest.raises(NotClosed):
        e1_project(C1, p1("x1"))


@given(seeds)
def test_exact_forms_project_to_zero(seed):
    rng, ch, gens = setup(seed)
    tau = random_poly(rng, gens, FORM_KINDS, 4, 3)
    w = omega(gens)
    pr = e1_project(ch, w * tau)
    assert pr.cls.is_zero
    assert w * pr.witness == w * tau


def test_d1_examples():
    assert d1(E1Class(C1, p1("1"))).cls.is_zero
    assert d1(E1Class(C1, p1("x1*xi1"))).cls.is_zero


def test_d2_examples():
    assert d2(E1Class(C1, p1("4"))).cls.is_zero
    assert d2(E1Class(C1, p1("x1*xi1"))).cls.representative == p1("-1")


@given(seeds)
def test_d1_vanishes_and_d2_is_minus_delta(seed):
    rng, ch, gens = setup(seed)
    s = random_poly(rng, gens, FUNCTION_KINDS, 4, 3)
    c = E1Class(ch, s)
    assert d1(c).cls.is_zero
    t = d2(c)
    assert t.cls.representative == -bv_laplacian(s)
    assert t.chain[1] == -homotopy_H(exterior_d(c.form()))


# Delta cohomology


@pytest.mark.parametrize("n, degree", [(1, 3), (2, 2), (2, 3)])
def test_cohomology_is_one_dimensional(n, degree):
    ch = Chart(n)
    res = delta_cohomology(GradedSlice.weight_bounded(ch, degree))
    assert res.dimension == 1
    top = SuperPolynomial.one(ch.gens)
    for a in range(1, n + 1):
        top = top * SuperPolynomial.gen(ch.gens, ch.gens.xi(a))
    assert res.representatives == (top,)


def test_constant_slice():
    res = delta_cohomology(GradedSlice.from_basis(C1, ["1"]))
    assert res.dimension == 1 and res.representatives == (p1("1"),)


def test_slice_must_be_closed():
    with pytest.raises(SliceNotClosed):
        GradedSlice.from_basis(C1, ["x1*xi1"])


def test_slice_sizes_frozen():
    assert len(GradedSlice.weight_bounded(Chart(1), 3).basis) == 7
    assert len(GradedSlice.weight_bounded(Chart(2), 2).basis) == 13


def test_operator_rows():
    sl = GradedSlice.from_basis(C1, ["1", "x1*xi1"])
    assert sl.operator_rows() == [[Gaussian(0), Gaussian(1)], [Gaussian(0), Gaussian(0)]]


# linear relations


def test_relation_zero_is_graph_of_omega():
    a = p1("x1*th1 + dxi1")
    assert relation_membership(0, a, omega(C1.gens) * a).member
    assert relation_membership(0, a, p1("dx1")).member is False


def test_relation_two_contains_d2():
    a = p1("x1*xi1*dx1")
    res = relation_membership(2, a, p1("-dx1"))
    assert res.member
    assert all(r.is_zero for r in relation_equations(2, a, res.chain, p1("-dx1")))


def test_relation_one_rejects_nonzero_class():
    res = relation_membership(1, p1("x1*xi1*dx1"), p1("dx1"))
    assert res.status == "infeasible"


def test_relation_bounds_give_undecided():
    res = relation_membership(1, p1("x1*xi1*dx1"), p1("dx1"), degree_max=0)
    assert res.status == "undecided" and res.member is None


def test_relation_rejects_non_closed_alpha():
    assert relation_membership(2, p1("x1"), p1("0")).status == "infeasible"


@given(seeds)
def test_d2_chains_are_relation_members(seed):
    rng, ch, gens = setup(seed, 2)
    s = random_poly(rng, gens, FUNCTION_KINDS, 3, 2)
    alpha = s * top_form(gens)
    beta = d2(E1Class(ch, s)).beta
    assert relation_membership(2, alpha, beta).member
    # shifting beta by an omega-exact form stays inside the relation
    tau = random_poly(rng, gens, FORM_KINDS, 2, 2)
    assert relation_membership(2, alpha, beta + omega(gens) * tau).member


@given(seeds)
def test_image_of_previous_relation_is_indeterminacy(seed):
    rng, ch, gens = setup(seed, 2)
    s = random_poly(rng, gens, FUNCTION_KINDS, 3, 2)
    alpha = s * top_form(gens)
    res1 = relation_membership(1, alpha, exterior_d(alpha) + omega(gens) * random_poly(rng, gens, FORM_KINDS, 2, 2))
    assert res1.member
    beta = exterior_d(alpha) + omega(gens) * res1.chain[0]
    # (alpha, beta) in the first relation puts (0, beta) in the second
    assert relation_membership(2, SuperPolynomial.zero(gens), beta).member
