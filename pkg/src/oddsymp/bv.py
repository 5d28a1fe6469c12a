"""Differential operators on ΠT*M and on forms.

Frozen conventions (checked by the ``conventions`` suite):

* odd bracket ``{f, g} = f_x g_xi + (-1)^|f| f_xi g_x``, so ``{x_i, xi_i} = 1``;
* ``Delta_rho f = (-1)^|f| / 2 * div_rho X_f``, which equals
  ``sum d/dx d/dxi f`` for the coordinate volume;
* ``Theta = sum xi_i dx_i``, so ``dTheta = omega`` and ``D = e^-Theta d e^Theta``;
* Berezin integrals read the coefficient with the listed product on the right;
* ``fourier(s) = int D(xi) exp(i dx.xi) s`` and
  ``inv_fourier(w) = c_n int D(dx) exp(-i dx.xi) w`` with ``c_n = -i`` for odd
  ``n`` and ``1`` for even ``n``;
* ``fourier o delta = i d o fourier`` and ``fourier o (H .) = i_H o fourier``;
* ``L_H = [delta, H]`` on densities and ``L_H = i [d, i_H]`` on forms, so that
  the Fourier transform intertwines the two actions;
* Schouten bracket ``[[H, G]] = -{H, G}``, the sign for which
  ``L_[[H,G]] = [L_H, L_G]``.
"""

from __future__ import annotations

from oddsymp import calculus
from oddsymp.calculus import darboux_theta, exterior_d, omega
from oddsymp.geometry import (
    CanonicalTransformation,
    Chart,
    GeometricObject,
    ObjectKind,
    pullback,
)
from oddsymp.grassmann import (
    FIELD_MASK,
    Gaussian,
    Kind,
    ParityError,
    Q,
    SuperPolynomial,
)

__all__ = [
    "WrongKind",
    "InadmissibleForm",
    "delta_half_density",
    "divergence",
    "odd_bracket",
    "schouten_bracket",
    "hamiltonian_vector_field",
    "laplacian_with_volume",
    "master_predicate",
    "de_rham",
    "omega_mult",
    "D_total",
    "theta_conjugation_check",
    "homotopy_H",
    "interior_product",
    "lie_derivative_density",
    "lie_derivative_form",
    "cartan_lie_derivative",
    "fourier",
    "inv_fourier",
    "fourier_inverse_constant",
    "pullback_form_via_fourier",
    "FOURIER_DELTA_CONSTANT",
    "SCHOUTEN_SIGN",
]

SCHOUTEN_SIGN = -1


class WrongKind(TypeError):
    """Operator applied to a geometric object of the wrong kind."""


class InadmissibleForm(ValueError):
    """Homotopy applied to a top-degree term with no dxi dependence."""

    def __init__(self, term: SuperPolynomial):
        super().__init__(f"homotopy undefined on top-degree dxi-free term {term}")
        self.term = term


def _need(obj: GeometricObject, *kinds: ObjectKind) -> None:
    if obj.kind not in kinds:
        names = ", ".join(k.value for k in kinds)
        raise WrongKind(f"expected {names}, got {obj.kind.value}")


def _homogeneous(p: SuperPolynomial, what: str) -> int:
    if not p.is_homogeneous():
        raise ParityError(f"{what} must be parity-homogeneous: {p}")
    return p.parity()


def _body(v) -> SuperPolynomial:
    return v.body if isinstance(v, GeometricObject) else v


# half-densities and multivector densities


def delta_half_density(sigma: GeometricObject) -> GeometricObject:
    """Canonical odd Laplacian: body ``s -> sum d/dx_i d/dxi_i s``."""
    _need(sigma, ObjectKind.DENSITY)
    return sigma.with_body(calculus.bv_laplacian(sigma.body))


def divergence(sigma: GeometricObject) -> GeometricObject:
    """Divergence of a multivector density ``s(x, x*) Dx``; same engine as Delta."""
    _need(sigma, ObjectKind.DENSITY)
    return sigma.with_body(calculus.bv_laplacian(sigma.body))


# brackets


def odd_bracket(F, G):
    """Canonical odd bracket of homogeneous multivector fields."""
    f, g = _body(F), _body(G)
    _homogeneous(f, "left argument")
    _homogeneous(g, "right argument")
    out = calculus.odd_bracket(f, g)
    if isinstance(F, GeometricObject):
        return GeometricObject(F.chart, ObjectKind.FIELD, out)
    return out


def schouten_bracket(F, G):
    """Schouten bracket of multivector fields, ``-{F, G}``."""
    out = odd_bracket(F, G)
    if isinstance(out, GeometricObject):
        return out.with_body(-out.body)
    return -out


def hamiltonian_vector_field(f: SuperPolynomial):
    """``X_f = {f, -}`` as a callable; a derivation of parity ``|f| + 1``."""
    _homogeneous(f, "Hamiltonian")
    return lambda g: calculus.odd_bracket(f, g)


def divergence_with_volume(components: dict, parity: int, rho: SuperPolynomial) -> SuperPolynomial:
    """``rho^-1 sum_a (-1)^{|a|(|X|+1)} d_a(rho X^a)`` for ``X = sum X^a d_a`` of parity ``parity``."""
    gens = rho.gens
    acc = SuperPolynomial.zero(gens)
    for g, comp in components.items():
        term = (rho * comp).derive(g)
        if g.parity and not parity:
            term = -term
        acc = acc + term
    return rho.inverse() * acc


def laplacian_with_volume(f, rho: GeometricObject):
    """``Delta_rho f = (-1)^|f| / 2 * div_rho X_f``, termwise over the parity parts of f."""
    _need(rho, ObjectKind.VOLUME)
    p = _body(f)
    gens = p.gens
    out = SuperPolynomial.zero(gens)
    for part, parity in ((p.even_part(), 0), (p.odd_part(), 1)):
        if not part:
            continue
        X = hamiltonian_vector_field(part)
        comps = {}
        for i in range(1, gens.n + 1):
            for g in (gens.x(i), gens.xi(i)):
                comps[g] = X(SuperPolynomial.gen(gens, g))
        div = divergence_with_volume(comps, parity ^ 1, rho.body)
        out = out + (-div if parity else div) * Q(1, 2)
    if isinstance(f, GeometricObject):
        return f.with_body(out)
    return out


def master_predicate(rho: GeometricObject, S) -> bool:
    """Whether ``Delta_rho exp(S/2) = 0``.

    The constant part of S only rescales ``exp(S/2)`` and is dropped; the
    remainder must be nilpotent so the exponential is a finite sum.
    """
    s = _body(S)
    if _homogeneous(s, "S"):
        raise ParityError("S must be even")
    c = s.constant_term()
    nil = s - SuperPolynomial.const(s.gens, c)
    if not nil.is_nilpotent():
        raise ValueError(f"S = {s} is not constant plus nilpotent; exp(S/2) is not polynomial")
    e = (nil * Q(1, 2)).exp_nilpotent()
    return laplacian_with_volume(e, rho).is_zero


# forms


def de_rham(sigma):
    if isinstance(sigma, GeometricObject):
        _need(sigma, ObjectKind.FORM)
        return sigma.with_body(exterior_d(sigma.body))
    return exterior_d(sigma)


def omega_mult(sigma):
    if isinstance(sigma, GeometricObject):
        _need(sigma, ObjectKind.FORM)
        return sigma.with_body(omega(sigma.body.gens) * sigma.body)
    return omega(sigma.gens) * sigma


def D_total(sigma):
    """``D = d + omega``."""
    if isinstance(sigma, GeometricObject):
        _need(sigma, ObjectKind.FORM)
        b = sigma.body
        return sigma.with_body(exterior_d(b) + omega(b.gens) * b)
    return exterior_d(sigma) + omega(sigma.gens) * sigma


def theta_conjugation_check(sigma) -> bool:
    """``e^-Theta d(e^Theta sigma) == D sigma`` with ``Theta = sum xi_i dx_i``."""
    b = _body(sigma)
    theta = darboux_theta(b.gens)
    lhs = (-theta).exp_nilpotent() * exterior_d(theta.exp_nilpotent() * b)
    return lhs == D_total(b)


def _form_degrees(gens, key):
    e, o = key
    p = (o & gens.kind_mask(Kind.DX)).bit_count()
    q = 0
    for g in gens.of_kind(Kind.DXI):
        q += (e >> gens.even_shift(g)) & FIELD_MASK
    return p, q


def homotopy_H(sigma):
    """Koszul homotopy for ``omega``: ``(H omega + omega H) sigma = sigma``.

    On a monomial of dx-degree p and dxi-degree q, applies
    ``sum d/ddx_i d/ddxi_i`` and scales by ``1/(n - p + q)``, the value of the
    t-integral. Top-degree terms (p = n) without dxi are rejected.
    """
    b = _body(sigma)
    gens = b.gens
    n = gens.n
    out = SuperPolynomial.zero(gens)
    for key, c in b.raw_terms().items():
        p, q = _form_degrees(gens, key)
        term = SuperPolynomial._raw(gens, {key: c})
        if p == n and q == 0:
            raise InadmissibleForm(term)
        acc = SuperPolynomial.zero(gens)
        for i in range(1, n + 1):
            acc = acc + term.derive(gens.dxi(i)).derive(gens.dx(i))
        if acc:
            out = out + acc * Q(1, n - p + q)
    if isinstance(sigma, GeometricObject):
        return sigma.with_body(out)
    return out


def interior_product(H, form):
    """``i_H = H(x, -i d/ddx)``: each x*_a becomes ``-i`` times the left derivative by dx_a."""
    h, w = _body(H), _body(form)
    gens = w.gens
    if h.gens != gens:
        raise ValueError("field and form live over different generator sets")
    if not h.depends_only_on({Kind.X, Kind.XI, Kind.THETA}):
        raise ValueError(f"multivector field {h} may only involve x, xi and th")
    xi_mask = gens.kind_mask(Kind.XI)
    minus_i = SuperPolynomial.const(gens, 0) - SuperPolynomial.imag(gens)
    out = SuperPolynomial.zero(gens)
    for (e, o), c in h.raw_terms().items():
        fibre = o & xi_mask
        coeff = SuperPolynomial._raw(gens, {(e, o ^ fibre): c})
        acc = w
        bits = [b for b in range(fibre.bit_length()) if fibre >> b & 1]
        for b in reversed(bits):
            g = gens.xi(b - gens.n_theta + 1)
            acc = acc.derive(gens.dx(g.index)) * minus_i
            if not acc:
                break
        if acc:
            out = out + coeff * acc
    if isinstance(form, GeometricObject):
        return form.with_body(out)
    return out


def _graded_commutator(A, B, pa: int, pb: int, x):
    ab = A(B(x))
    ba = B(A(x))
    return ab - ba if not (pa and pb) else ab + ba


def lie_derivative_density(H, sigma):
    """``L_H = [delta, H]``: ``delta(H s) - (-1)^|H| H delta(s)``."""
    h = _body(H)
    ph = _homogeneous(h, "H")
    s = _body(sigma)
    if isinstance(sigma, GeometricObject):
        _need(sigma, ObjectKind.DENSITY)
    lap = calculus.bv_laplacian
    out = lap(h * s) - h * lap(s) if not ph else lap(h * s) + h * lap(s)
    if isinstance(sigma, GeometricObject):
        return sigma.with_body(out)
    return out


def lie_derivative_form(H, form):
    """``L_H = i [d, i_H]`` (graded commutator; d is odd, i_H has parity |H|)."""
    h = _body(H)
    ph = _homogeneous(h, "H")
    w = _body(form)
    if isinstance(form, GeometricObject):
        _need(form, ObjectKind.FORM)
    comm = _graded_commutator(exterior_d, lambda v: interior_product(h, v), 1, ph, w)
    out = SuperPolynomial.imag(w.gens) * comm
    if isinstance(form, GeometricObject):
        return form.with_body(out)
    return out


def cartan_lie_derivative(X: SuperPolynomial, form: SuperPolynomial) -> SuperPolynomial:
    """Classical ``d i_X + i_X d`` for a vector field ``X = X^a x*_a`` with even coefficients.

    The contraction is the plain left derivative ``sum X^a d/ddx_a``; used as
    an independent check on :func:`lie_derivative_form`.
    """
    gens = form.gens

    def contract(w):
        acc = SuperPolynomial.zero(gens)
        for a in range(1, gens.n + 1):
            comp = X.derive(gens.xi(a))
            if comp:
                acc = acc + comp * w.derive(gens.dx(a))
        return acc

    return exterior_d(contract(form)) + contract(exterior_d(form))


# Fourier transform between multivector densities and forms on M


def _kernel(gens, sign: int) -> SuperPolynomial:
    k = SuperPolynomial.one(gens)
    i = SuperPolynomial.imag(gens)
    for a in range(1, gens.n + 1):
        t = SuperPolynomial.gen(gens, gens.dx(a)) * SuperPolynomial.gen(gens, gens.xi(a))
        k = k * (1 + i * t) if sign > 0 else k * (1 - i * t)
    return k


def fourier_inverse_constant(n: int) -> Gaussian:
    """Normalization making ``inv_fourier o fourier`` the identity."""
    return Gaussian(0, -1) if n % 2 else Gaussian(1)


def fourier(sigma):
    """``int D(xi_1..xi_n) exp(i dx.xi) s`` for a density body free of dx, dxi."""
    s = _body(sigma)
    if not s.depends_only_on({Kind.X, Kind.XI, Kind.THETA}):
        raise ValueError(f"Fourier transform needs a density body in x, xi, th: {s}")
    gens = s.gens
    out = (_kernel(gens, 1) * s).berezin([gens.xi(a) for a in range(1, gens.n + 1)])
    if isinstance(sigma, GeometricObject):
        return GeometricObject(sigma.chart, ObjectKind.FORM, out)
    return out


def inv_fourier(form):
    """``c_n int D(dx_1..dx_n) exp(-i dx.xi) w`` for a form in x, dx, th."""
    w = _body(form)
    if not w.depends_only_on({Kind.X, Kind.DX, Kind.THETA}):
        raise ValueError(f"inverse Fourier transform needs a base form in x, dx, th: {w}")
    gens = w.gens
    out = (_kernel(gens, -1) * w).berezin([gens.dx(a) for a in range(1, gens.n + 1)])
    out = SuperPolynomial.const(gens, fourier_inverse_constant(gens.n)) * out
    if isinstance(form, GeometricObject):
        return GeometricObject(form.chart, ObjectKind.DENSITY, out)
    return out


FOURIER_DELTA_CONSTANT = "i"


def pullback_form_via_fourier(F: CanonicalTransformation, form: GeometricObject) -> GeometricObject:
    """Action on base forms: ``fourier(pullback(F, inv_fourier(form)))``."""
    _need(form, ObjectKind.FORM)
    dens = inv_fourier(form)
    return fourier(pullback(F, dens))


def as_density(chart: Chart, body) -> GeometricObject:
    return GeometricObject.density(chart, body)
