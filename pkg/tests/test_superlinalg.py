import pytest
from hypothesis import given
from hypothesis import strategies as st

from oddsymp.grassmann import GeneratorSet, NotInvertible, ParityError, SuperPolynomial
from oddsymp.superlinalg import (
    SuperMatrix,
    berezinian,
    check_berezinian_identity,
    det_even,
    format_matrix,
    inverse_even,
    is_symplectic,
    parse_matrix,
    sample_symplectic,
    supertranspose,
)
from tests.strategies import seeds

G = GeneratorSet(2, 2)


def P(t, gens=G):
    return SuperPolynomial.parse(t, gens)


def M(rows, gens=G):
    return tuple(tuple(P(str(x), gens) for x in r) for r in rows)


def test_det_examples():
    assert det_even(M([[1, 0], [0, 1]])) == P("1")
    assert det_even(M([[2, 0], [0, 3]])) == P("6")
    assert det_even(M([["1+th1*th2", 0], [0, 1]])) == P("1+th1*th2")


def test_det_rejects_odd_entries():
    with pytest.raises(ParityError):
        det_even(M([["th1", 0], [0, 1]]))


def test_supertranspose_examples():
    g1 = GeneratorSet(1, 1)
    one = SuperMatrix.identity(G, 2)
    assert supertranspose(one) == one
    J = SuperMatrix.from_blocks(M([[0]], g1), M([["th1"]], g1), M([[0]], g1), M([[0]], g1))
    assert supertranspose(J).J10 == M([["-th1"]], g1)
    K = SuperMatrix.block_diag(M([[1, 2], [0, 1]]), M([[3, 0], [1, 1]]))
    assert supertranspose(supertranspose(K)) == K


def test_berezinian_examples():
    g1 = GeneratorSet(1, 2)
    assert berezinian(SuperMatrix.identity(g1, 1)) == P("1", g1)
    J = SuperMatrix.block_diag(M([[2]], g1), M([["1/2"]], g1))
    assert berezinian(J) == P("4", g1)
    K = SuperMatrix.from_blocks(M([[1]], g1), M([["th1"]], g1), M([["th2"]], g1), M([[1]], g1))
    assert berezinian(K) == P("1 + th2*th1", g1)


def test_berezinian_singular_body():
    g1 = GeneratorSet(1, 1)
    J = SuperMatrix.block_diag(M([["th1*0"]], g1), M([[1]], g1))
    with pytest.raises(NotInvertible):
        berezinian(J)


def test_inverse_even():
    A = M([["2+th1*th2", 1], [0, 1]])
    inv = inverse_even(A)
    prod = SuperMatrix.block_diag(A, A) @ SuperMatrix.block_diag(inv, inv)
    assert prod == SuperMatrix.identity(G, 2)


def test_is_symplectic_examples():
    assert is_symplectic(SuperMatrix.identity(G, 2)).ok
    g = M([[1, 1], [0, 1]])
    gti = M([[1, 0], [-1, 1]])
    assert is_symplectic(SuperMatrix.block_diag(g, gti)).ok
    g1 = GeneratorSet(1)
    cert = is_symplectic(SuperMatrix.block_diag(M([[2]], g1), M([[2]], g1)))
    assert not cert.ok and "JBJst=B" in cert.failures


def test_berezinian_identity_examples():
    g1 = GeneratorSet(1)
    assert check_berezinian_identity(SuperMatrix.identity(g1, 1))
    assert check_berezinian_identity(SuperMatrix.block_diag(M([[2]], g1), M([["1/2"]], g1)))


def test_sampler_without_theta_is_block_diagonal():
    J = sample_symplectic(3, 0, seed=5)
    assert all(x.is_zero for row in J.J01 + J.J10 for x in row)


def test_sampler_is_deterministic():
    assert sample_symplectic(2, 3, seed=11) == sample_symplectic(2, 3, seed=11)


def test_sampler_rejects_n_zero():
    with pytest.raises(ValueError):
        sample_symplectic(0, 1, seed=0)


def test_matrix_text_round_trip():
    J = sample_symplectic(2, 2, seed=4)
    assert parse_matrix(format_matrix(J), J.gens) == J


@given(seeds, st.integers(1, 3), st.integers(0, 4))
def test_samples_symplectic_and_identity(seed, n, budget):
    J = sample_symplectic(n, budget, seed)
    assert is_symplectic(J).ok
    assert check_berezinian_identity(J)


@given(seeds, st.integers(1, 3), st.integers(0, 3))
def test_berezinian_multiplicative(seed, n, budget):
    J = sample_symplectic(n, budget, seed)
    K = sample_symplectic(n, budget, seed + 1)
    assert berezinian(J @ K) == berezinian(J) * berezinian(K)


@given(seeds, st.integers(1, 3))
def test_det_multiplicative(seed, n):
    A = sample_symplectic(n, 2, seed).J00
    B = sample_symplectic(n, 2, seed + 7).J00
    AB = (SuperMatrix.block_diag(A, A) @ SuperMatrix.block_diag(B, B)).J00
    assert det_even(AB) == det_even(A) * det_even(B)


def test_det_equals_body_without_theta():
    J = sample_symplectic(3, 0, seed=9)
    assert det_even(J.J00).is_constant()


@given(seeds, st.integers(1, 3))
def test_supertranspose_reverses_products(seed, n):
    J = sample_symplectic(n, 2, seed)
    K = sample_symplectic(n, 2, seed + 1)
    assert supertranspose(J @ K) == supertranspose(K) @ supertranspose(J)
