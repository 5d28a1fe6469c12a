"""The linear-relations spectral sequence of ``D = d + omega`` on small polynomial charts.

Classes of the ``omega``-differential are carried as half-density
representatives; every claim about a class comes with a checkable witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from oddsymp import linalg
from oddsymp.bv import homotopy_H
from oddsymp.calculus import bv_laplacian, exterior_d, omega
from oddsymp.geometry import Chart, GeometricObject, ObjectKind
from oddsymp.grassmann import FIELD_MASK, Gaussian, Kind, SuperPolynomial

__all__ = [
    "NotClosed",
    "SliceNotClosed",
    "E1Class",
    "e1_project",
    "d1",
    "d2",
    "GradedSlice",
    "CohomologyResult",
    "delta_cohomology",
    "RelationResult",
    "relation_membership",
]


class NotClosed(ValueError):
    """Form is not annihilated by multiplication with omega."""


class SliceNotClosed(ValueError):
    """The Laplacian leaves the span of the slice basis."""


def _body(v):
    return v.body if isinstance(v, GeometricObject) else v


def top_form(gens) -> SuperPolynomial:
    """``dx_1 ... dx_n``."""
    out = SuperPolynomial.one(gens)
    for a in range(1, gens.n + 1):
        out = out * SuperPolynomial.gen(gens, gens.dx(a))
    return out


@dataclass(frozen=True)
class E1Class:
    chart: Chart
    representative: SuperPolynomial

    @property
    def is_zero(self) -> bool:
        return self.representative.is_zero

    def form(self) -> SuperPolynomial:
        """The canonical representative ``s dx_1 ... dx_n``."""
        return self.representative * top_form(self.chart.gens)

    def __str__(self) -> str:
        return f"[{self.representative}]"


@dataclass(frozen=True)
class Projection:
    """``sigma = s dx_1...dx_n + omega * witness``."""

    cls: E1Class
    witness: SuperPolynomial


def e1_project(chart: Chart, sigma) -> Projection:
    """Top dx-degree part at ``dxi = 0``, plus the exactness witness for the rest."""
    b = _body(sigma)
    gens = b.gens
    if not (omega(gens) * b).is_zero:
        raise NotClosed(f"omega * sigma != 0 for sigma = {b}")
    full = gens.kind_mask(Kind.DX)
    dxi = gens.kind_even_mask(Kind.DXI)
    s_terms, top_terms = {}, {}
    for (e, o), c in b.raw_terms().items():
        if (o & full) == full and not (e & dxi):
            s_terms[(e, o & ~full)] = c
            top_terms[(e, o)] = c
    s = SuperPolynomial(gens, s_terms)
    rest = b - SuperPolynomial(gens, top_terms)
    return Projection(E1Class(chart, s), homotopy_H(rest))


@dataclass(frozen=True)
class Transgression:
    """Result of a differential: the class and the chain that produced it."""

    cls: E1Class
    chain: tuple[SuperPolynomial, ...]
    beta: SuperPolynomial


def d1(c: E1Class) -> Transgression:
    """Class of ``d alpha + omega alpha_1`` with ``alpha_1 = -H(d alpha)``; always zero."""
    alpha = c.form()
    da = exterior_d(alpha)
    a1 = -homotopy_H(da)
    beta = da + omega(alpha.gens) * a1
    return Transgression(e1_project(c.chart, beta).cls, (alpha, a1), beta)


def d2(c: E1Class) -> Transgression:
    """Class of ``beta = d alpha_1`` with ``alpha_1 = -H(d alpha)``; equals ``-Delta c``."""
    alpha = c.form()
    a1 = -homotopy_H(exterior_d(alpha))
    beta = exterior_d(a1)
    return Transgression(e1_project(c.chart, beta).cls, (alpha, a1), beta)


# Laplacian cohomology on finite slices


def _xi_monomials(gens, size):
    for subset in itertools.combinations(range(1, gens.n + 1), size):
        m = SuperPolynomial.one(gens)
        for a in subset:
            m = m * SuperPolynomial.gen(gens, gens.xi(a))
        yield m


def _x_monomials(gens, degree):
    n = gens.n
    for combo in itertools.combinations_with_replacement(range(1, n + 1), degree):
        m = SuperPolynomial.one(gens)
        for a in combo:
            m = m * SuperPolynomial.gen(gens, gens.x(a))
        yield m


@dataclass
class GradedSlice:
    """Finite set of density monomials on which Delta is computed exactly.

    The default slice holds every theta-free monomial ``x^a xi_S`` whose weight
    ``|a| + n - |S|`` is at most ``degree_max``. Delta preserves the weight, so
    the slice is closed and its cohomology has no truncation artifacts.
    """

    chart: Chart
    basis: list[SuperPolynomial]
    degree_max: int | None = None
    matrix: list[dict] = field(default_factory=list, repr=False)

    @classmethod
    def weight_bounded(cls, chart: Chart, degree_max: int) -> GradedSlice:
        gens = chart.gens
        n = chart.n
        basis = []
        for w in range(degree_max + 1):
            for k in range(n, -1, -1):
                deg = w - n + k
                if deg < 0:
                    continue
                for xm in _x_monomials(gens, deg):
                    for xim in _xi_monomials(gens, k):
                        basis.append(xm * xim)
        return cls(chart, basis, degree_max).closed()

    @classmethod
    def from_basis(cls, chart: Chart, basis) -> GradedSlice:
        return cls(chart, [chart.poly(b) for b in basis]).closed()

    def closed(self) -> GradedSlice:
        """Fill in the operator matrix; raise if Delta leaves the span."""
        cols = [linalg.poly_to_vector(b) for b in self.basis]
        basis = linalg.IncrementalBasis()
        for j, col in enumerate(cols):
            if basis.add(col, j) is not None:
                raise SliceNotClosed(f"basis element {self.basis[j]} is linearly dependent")
        matrix = []
        for b in self.basis:
            img = linalg.poly_to_vector(bv_laplacian(b))
            r, combo = basis.reduce(img)
            if r:
                raise SliceNotClosed(f"Delta({b}) = {bv_laplacian(b)} leaves the slice")
            matrix.append(combo)
        self.matrix = matrix
        return self

    def operator_rows(self) -> list[list[Gaussian]]:
        """Dense matrix of Delta in the slice basis (row i, column j)."""
        m = len(self.basis)
        return [[self.matrix[j].get(i, Gaussian()) for j in range(m)] for i in range(m)]


@dataclass(frozen=True)
class CohomologyResult:
    dimension: int
    representatives: tuple[SuperPolynomial, ...]
    kernel_dim: int
    image_dim: int
    slice_size: int


def delta_cohomology(sl: GradedSlice) -> CohomologyResult:
    gens = sl.chart.gens
    images = sl.matrix
    kernel = linalg.kernel(images)
    quotient = linalg.IncrementalBasis()
    image_dim = 0
    for j, col in enumerate(images):
        if quotient.add(col, ("im", j)) is None:
            image_dim += 1
    reps = []
    for v in kernel:
        if quotient.add(v, ("ker", len(reps))) is None:
            p = SuperPolynomial.zero(gens)
            for j, c in v.items():
                p = p + sl.basis[j] * SuperPolynomial.const(gens, c)
            reps.append(p)
    return CohomologyResult(len(reps), tuple(reps), len(kernel), image_dim, len(sl.basis))


# linear relations


def _grade(gens, key):
    """``(deg x + deg dx, deg xi + deg dxi, form degree, theta mask)`` of a monomial."""
    e, o = key
    dx = (o & gens.kind_mask(Kind.DX)).bit_count()
    xi = (o & gens.kind_mask(Kind.XI)).bit_count()
    degx = sum((e >> gens.even_shift(g)) & FIELD_MASK for g in gens.of_kind(Kind.X))
    degdxi = sum((e >> gens.even_shift(g)) & FIELD_MASK for g in gens.of_kind(Kind.DXI))
    return (degx + dx, xi + degdxi, dx + degdxi, o & gens.kind_mask(Kind.THETA))


@lru_cache(maxsize=None)
def _graded_piece(gens, grade):
    """Every monomial of the given grade, as ``(polynomial, even degree)``."""
    g1, g2, f, tmask = grade
    if min(g1, g2, f) < 0:
        return ()
    n = gens.n
    th = SuperPolynomial.one(gens)
    for t in gens.of_kind(Kind.THETA):
        if tmask >> gens.odd_bit(t) & 1:
            th = th * SuperPolynomial.gen(gens, t)
    out = []
    for p in range(0, min(n, f) + 1):
        q = f - p
        k = g2 - q
        degx = g1 - p
        if k < 0 or k > n or degx < 0:
            continue
        for dxs in itertools.combinations(range(1, n + 1), p):
            dxm = SuperPolynomial.one(gens)
            for a in dxs:
                dxm = dxm * SuperPolynomial.gen(gens, gens.dx(a))
            for dxim_idx in itertools.combinations_with_replacement(range(1, n + 1), q):
                dxim = SuperPolynomial.one(gens)
                for a in dxim_idx:
                    dxim = dxim * SuperPolynomial.gen(gens, gens.dxi(a))
                for xm in _x_monomials(gens, degx):
                    for xim in _xi_monomials(gens, k):
                        out.append((th * xm * xim * dxm * dxim, degx + q))
    return tuple(out)


def _components(gens, p):
    out: dict = {}
    for key, c in p.raw_terms().items():
        g = _grade(gens, key)
        out.setdefault(g, {})[key] = c
    return {g: SuperPolynomial(gens, t) for g, t in out.items()}


def _shift(g, k):
    return (g[0] - k, g[1] - k, g[2] - k, g[3])


@dataclass(frozen=True)
class RelationResult:
    """``status`` is ``feasible``, ``infeasible`` or ``undecided``."""

    status: str
    chain: tuple[SuperPolynomial, ...] = ()
    reason: str = ""

    @property
    def member(self) -> bool | None:
        return {"feasible": True, "infeasible": False}.get(self.status)


def relation_equations(r, alpha, chain, beta):
    """Residuals of ``omega a = 0, d a + omega a_1 = 0, ..., d a_{r-1} + omega a_r = beta``."""
    gens = alpha.gens
    w = omega(gens)
    if r == 0:
        return [w * alpha - beta]
    seq = (alpha,) + tuple(chain)
    res = [w * alpha]
    for k in range(1, r + 1):
        rhs = beta if k == r else SuperPolynomial.zero(gens)
        res.append(exterior_d(seq[k - 1]) + w * seq[k] - rhs)
    return res


def relation_membership(r: int, alpha, beta, degree_max: int | None = None) -> RelationResult:
    """Search for a witness chain showing ``(alpha, beta)`` lies in the r-th relation.

    ``d`` and ``omega`` are homogeneous for the grading returned by
    :func:`_grade`, so the search splits into finite graded pieces and is
    decidable. ``degree_max`` bounds the even degree (x and dxi exponents) of
    the unknowns; when that bound removes monomials the solver needs, a
    negative answer is reported as ``undecided``.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    a, b = _body(alpha), _body(beta)
    gens = a.gens
    w = omega(gens)
    if r == 0:
        ok = (w * a) == b
        return RelationResult("feasible" if ok else "infeasible", (), "" if ok else "beta != omega*alpha")
    if not (w * a).is_zero:
        return RelationResult("infeasible", (), "omega*alpha != 0")
    # a chain line is labelled by the grade of its alpha_0 component
    lines = set(_components(gens, a))
    for g in _components(gens, b):
        lines.add((g[0] + r - 1, g[1] + r - 1, g[2] + r - 2, g[3]))
    unknowns = []
    truncated = False
    for line in sorted(lines):
        for k in range(1, r + 1):
            for mono, deg in _graded_piece(gens, _shift(line, k)):
                if degree_max is not None and deg > degree_max:
                    truncated = True
                    continue
                unknowns.append((k, mono))
    columns = []
    for k, mono in unknowns:
        col = {}
        for eq, img in ((k, w * mono), (k + 1, exterior_d(mono))):
            if eq > r:
                continue
            for key, c in linalg.poly_to_vector(img).items():
                col[(eq, key)] = c
        columns.append(col)
    target = {}
    for key, c in linalg.poly_to_vector(-exterior_d(a)).items():
        target[(1, key)] = c
    for key, c in linalg.poly_to_vector(b).items():
        s = target.get((r, key), Gaussian()) + c
        if s:
            target[(r, key)] = s
        else:
            target.pop((r, key), None)
    coeffs = linalg.solve(columns, target)
    if coeffs is None:
        if truncated:
            return RelationResult("undecided", (), f"no chain with even degree <= {degree_max}")
        return RelationResult("infeasible", (), "no chain exists in any degree")
    chain = [SuperPolynomial.zero(gens) for _ in range(r)]
    for (k, mono), c in zip(unknowns, coeffs):
        if c:
            chain[k - 1] = chain[k - 1] + mono * SuperPolynomial.const(gens, c)
    res = relation_equations(r, a, chain, b)
    assert all(x.is_zero for x in res), "solver returned a chain that fails the relation"
    return RelationResult("feasible", tuple(chain))
