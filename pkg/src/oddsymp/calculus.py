"""Polynomial-level operators shared by the geometry and operator modules.

Everything here acts on bare :class:`SuperPolynomial` values in Darboux
variables; kind checking happens one level up.
"""

from __future__ import annotations

from oddsymp.grassmann import GeneratorSet, ParityError, SuperPolynomial

__all__ = ["exterior_d", "omega", "bv_laplacian", "odd_bracket", "darboux_theta"]


def _g(gens, g):
    return SuperPolynomial.gen(gens, g)


def exterior_d(p: SuperPolynomial) -> SuperPolynomial:
    """``sum dx_i d/dx_i + dxi_i d/dxi_i`` with the differential on the left."""
    gens = p.gens
    out = SuperPolynomial.zero(gens)
    for i in range(1, gens.n + 1):
        dx_part = p.derive(gens.x(i))
        if dx_part:
            out = out + _g(gens, gens.dx(i)) * dx_part
        dxi_part = p.derive(gens.xi(i))
        if dxi_part:
            out = out + _g(gens, gens.dxi(i)) * dxi_part
    return out


def omega(gens: GeneratorSet) -> SuperPolynomial:
    """The Darboux symplectic form ``sum dx_i dxi_i`` (odd)."""
    out = SuperPolynomial.zero(gens)
    for i in range(1, gens.n + 1):
        out = out + _g(gens, gens.dx(i)) * _g(gens, gens.dxi(i))
    return out


def darboux_theta(gens: GeneratorSet) -> SuperPolynomial:
    """Even one-form ``sum xi_i dx_i`` with ``d`` of it equal to :func:`omega`."""
    out = SuperPolynomial.zero(gens)
    for i in range(1, gens.n + 1):
        out = out + _g(gens, gens.xi(i)) * _g(gens, gens.dx(i))
    return out


def bv_laplacian(p: SuperPolynomial) -> SuperPolynomial:
    """``sum d/dx_i d/dxi_i p`` (left derivatives)."""
    gens = p.gens
    out = SuperPolynomial.zero(gens)
    for i in range(1, gens.n + 1):
        out = out + p.derive(gens.xi(i)).derive(gens.x(i))
    return out


def odd_bracket(f: SuperPolynomial, g: SuperPolynomial) -> SuperPolynomial:
    """Canonical odd bracket ``{f, g} = f_x g_xi + (-1)^|f| f_xi g_x``.

    Summed over conjugate pairs, left derivatives throughout; ``{x_i, xi_i} = 1``.
    ``g -> {f, g}`` is a left derivation of parity ``|f| + 1``.
    """
    if not f.is_homogeneous():
        raise ParityError(f"bracket needs a homogeneous left argument, got {f}")
    gens = f.gens
    sign = -1 if f.parity() else 1
    out = SuperPolynomial.zero(gens)
    for i in range(1, gens.n + 1):
        x, xi = gens.x(i), gens.xi(i)
        fx = f.derive(x)
        if fx:
            out = out + fx * g.derive(xi)
        fxi = f.derive(xi)
        if fxi:
            term = fxi * g.derive(x)
            out = out + term if sign > 0 else out - term
    return out
