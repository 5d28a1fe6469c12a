"""Seeded random polynomials, objects and transformations for the check suites.

All randomness flows through a ``random.Random`` instance (MT19937) so that
a seed replays identically on any platform.
"""

from __future__ import annotations

import random

from oddsymp.geometry import (
    CanonicalTransformation,
    Chart,
    compose,
    make_diffeo,
    make_fiber_shift,
    make_hamiltonian_flow,
)
from oddsymp.grassmann import GeneratorSet, Kind, Q, SuperPolynomial

FUNCTION_KINDS = (Kind.X, Kind.XI, Kind.THETA)
FORM_KINDS = (Kind.X, Kind.XI, Kind.DX, Kind.DXI, Kind.THETA)
BASE_FORM_KINDS = (Kind.X, Kind.DX, Kind.THETA)


def trial_rng(seed: int, offset: int) -> random.Random:
    """Independent stream for trial ``offset`` of a run seeded with ``seed``."""
    return random.Random(seed * 1_000_003 + offset)


def random_coefficient(rng: random.Random):
    while True:
        q = Q(rng.randint(-5, 5), rng.randint(1, 3))
        if q:
            return q


def random_monomial(rng, gens: GeneratorSet, kinds, max_degree: int) -> SuperPolynomial:
    """A random monomial whose even part has total degree at most ``max_degree``."""
    m = SuperPolynomial.const(gens, random_coefficient(rng))
    even = [g for k in kinds if not k.parity for g in gens.of_kind(k)]
    odd = [g for k in kinds if k.parity for g in gens.of_kind(k)]
    budget = rng.randint(0, max_degree)
    for _ in range(budget):
        if even and rng.random() < 0.6:
            m = m * SuperPolynomial.gen(gens, rng.choice(even))
    for g in odd:
        if rng.random() < 0.35:
            m = m * SuperPolynomial.gen(gens, g)
    return m


def random_poly(
    rng: random.Random,
    gens: GeneratorSet,
    kinds=FUNCTION_KINDS,
    max_terms: int = 4,
    max_degree: int = 3,
    parity: int | None = None,
    nonzero: bool = True,
) -> SuperPolynomial:
    while True:
        p = SuperPolynomial.zero(gens)
        for _ in range(rng.randint(1, max_terms)):
            p = p + random_monomial(rng, gens, kinds, max_degree)
        if parity is not None:
            p = p.even_part() if parity == 0 else p.odd_part()
        if p or not nonzero:
            return p


def random_admissible_form(rng, gens: GeneratorSet, max_terms=4, max_degree=3) -> SuperPolynomial:
    """A form on which the Koszul homotopy is defined."""
    n = gens.n
    full_dx = gens.kind_mask(Kind.DX)
    dxi_mask = gens.kind_even_mask(Kind.DXI)
    while True:
        p = random_poly(rng, gens, FORM_KINDS, max_terms, max_degree)
        p = p.filter(lambda k: (k[1] & full_dx) != full_dx or (k[0] & dxi_mask))
        if rng.random() < 0.4 and n:
            # make sure top-degree terms with dxi also appear
            top = SuperPolynomial.gen(gens, gens.dxi(rng.randint(1, n)))
            top = top * random_poly(rng, gens, (Kind.X, Kind.XI, Kind.THETA), 2, 2)
            for a in range(1, n + 1):
                top = top * SuperPolynomial.gen(gens, gens.dx(a))
            p = p + top
        if p:
            return p


def random_triangular_diffeo(rng, chart: Chart) -> CanonicalTransformation:
    """``x_k -> a_k x_k + p_k(x_{k+1}, ..., x_n)`` under a random relabelling."""
    gens = chart.gens
    n = chart.n
    xs = [SuperPolynomial.gen(gens, gens.x(i)) for i in range(1, n + 1)]
    perm = list(range(n))
    rng.shuffle(perm)
    scale = [Q(rng.choice([1, -1, 2, -2, 3])) * Q(1, rng.choice([1, 2])) for _ in range(n)]
    shift = []
    for k in range(n):
        p = SuperPolynomial.zero(gens)
        later = perm[k + 1:]
        if later:
            for _ in range(rng.randint(0, 2)):
                mono = SuperPolynomial.const(gens, rng.randint(-2, 2))
                for _ in range(rng.randint(1, 2)):
                    mono = mono * xs[rng.choice(later)]
                p = p + mono
        shift.append(p)
    # phi_{perm[k]} = a_k x_{perm[k]} + p_k(x_{perm[k+1:]})
    phi = [None] * n
    for k in range(n):
        phi[perm[k]] = xs[perm[k]] * scale[k] + shift[k]
    # inverse by back substitution from the last variable in the order
    inv = [None] * n
    for k in reversed(range(n)):
        sub = {gens.x(perm[j] + 1): inv[perm[j]] for j in range(k + 1, n)}
        inv[perm[k]] = (xs[perm[k]] - shift[k].substitute(sub)) * (Q(1) / scale[k])
    return make_diffeo(chart, phi, inv)


def random_shift_potential(rng, chart: Chart, max_degree=2) -> SuperPolynomial:
    gens = chart.gens
    return random_poly(rng, gens, (Kind.X, Kind.THETA), 3, max_degree, parity=1)


def random_flow_hamiltonian(rng, chart: Chart) -> SuperPolynomial:
    """Odd Hamiltonian whose every term carries a theta; often quadratic in xi."""
    gens = chart.gens
    m = chart.n_theta
    while True:
        H = SuperPolynomial.zero(gens)
        for _ in range(rng.randint(1, 3)):
            term = SuperPolynomial.const(gens, random_coefficient(rng))
            term = term * SuperPolynomial.gen(gens, gens.th(rng.randint(1, m)))
            for _ in range(rng.randint(0, 2)):
                term = term * SuperPolynomial.gen(gens, gens.x(rng.randint(1, chart.n)))
            k = rng.choice([0, 1, 2, 2])
            for a in rng.sample(range(1, chart.n + 1), min(k, chart.n)):
                term = term * SuperPolynomial.gen(gens, gens.xi(a))
            H = H + term
        H = H.odd_part()
        if H:
            return H


def random_transformation(rng, chart: Chart, factors: tuple[int, int] = (2, 4)) -> CanonicalTransformation:
    """Random composite of diffeomorphisms, fiber shifts and nilpotent flows."""
    makers = ["diffeo"]
    if chart.n_theta:
        makers += ["shift", "flow"]
    F = None
    for _ in range(rng.randint(*factors)):
        kind = rng.choice(makers)
        if kind == "diffeo":
            step = random_triangular_diffeo(rng, chart)
        elif kind == "shift":
            step = make_fiber_shift(chart, random_shift_potential(rng, chart))
        else:
            step = make_hamiltonian_flow(chart, random_flow_hamiltonian(rng, chart))[0]
        F = step if F is None else compose(F, step)
    return F
