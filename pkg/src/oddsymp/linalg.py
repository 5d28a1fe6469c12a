"""Exact sparse linear algebra over the Gaussian rationals.

Vectors are dicts from an arbitrary hashable index to a nonzero
:class:`Gaussian`. Polynomials become vectors indexed by their monomials with
the imaginary unit folded into the coefficient.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping

from oddsymp.grassmann import FIELD_MASK, Gaussian, GeneratorSet, SuperPolynomial

Vector = dict

__all__ = ["poly_to_vector", "vector_to_poly", "IncrementalBasis", "solve", "kernel", "rank"]


def poly_to_vector(p: SuperPolynomial) -> Vector:
    out: dict = {}
    for (e, o), c in p.raw_terms().items():
        key = (e & ~FIELD_MASK, o)
        g = out.get(key, Gaussian())
        g = g + (Gaussian(0, c) if e & FIELD_MASK else Gaussian(c))
        if g:
            out[key] = g
        else:
            out.pop(key, None)
    return out


def vector_to_poly(gens: GeneratorSet, v: Mapping) -> SuperPolynomial:
    terms = {}
    for (e, o), g in v.items():
        if g.re:
            terms[(e, o)] = g.re
        if g.im:
            terms[(e | 1, o)] = g.im
    return SuperPolynomial(gens, terms)


def _axpy(y: dict, a: Gaussian, x: Mapping) -> None:
    """``y += a*x`` in place, dropping zeros."""
    for k, v in x.items():
        s = y.get(k)
        s = a * v if s is None else s + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


class IncrementalBasis:
    """Echelon basis of a growing list of vectors, tracking how each pivot was made.

    ``add`` returns ``None`` when the vector is new (it becomes a pivot) and
    otherwise the combination of earlier inputs that reproduces it.
    """

    def __init__(self):
        self._pivots: dict[Hashable, tuple[Vector, Vector]] = {}
        self._order: list[Hashable] = []
        self.count = 0

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, v: Mapping) -> tuple[Vector, Vector]:
        """Residual of ``v`` and the combination ``c`` with ``v = residual + sum c_j input_j``."""
        r = dict(v)
        combo: dict = {}
        for key in self._order:
            a = r.get(key)
            if a is None:
                continue
            vec, how = self._pivots[key]
            _axpy(r, -a, vec)
            _axpy(combo, a, how)
        return r, combo

    def add(self, v: Mapping, label: Hashable | None = None) -> Vector | None:
        label = self.count if label is None else label
        self.count += 1
        r, combo = self.reduce(v)
        if not r:
            return combo
        key = min(r, key=repr)
        inv = r[key].inverse()
        vec = {k: x * inv for k, x in r.items()}
        how = {k: -x * inv for k, x in combo.items()}
        _axpy(how, inv, {label: Gaussian(1)})
        # keep earlier pivots reduced with respect to the new one
        for k in self._order:
            pv, ph = self._pivots[k]
            a = pv.get(key)
            if a is not None:
                _axpy(pv, -a, vec)
                _axpy(ph, -a, how)
        self._pivots[key] = (vec, how)
        self._order.append(key)
        return None


def solve(columns: Iterable[Mapping], target: Mapping) -> list[Gaussian] | None:
    """Coefficients ``c`` with ``sum c_j columns[j] == target``, or ``None``."""
    basis = IncrementalBasis()
    cols = list(columns)
    for j, col in enumerate(cols):
        basis.add(col, j)
    r, combo = basis.reduce(target)
    if r:
        return None
    return [combo.get(j, Gaussian()) for j in range(len(cols))]


def kernel(columns: Iterable[Mapping]) -> list[Vector]:
    """Basis of ``{c : sum c_j columns[j] = 0}`` as sparse coefficient vectors."""
    basis = IncrementalBasis()
    out = []
    for j, col in enumerate(columns):
        dep = basis.add(col, j)
        if dep is not None:
            v = {k: -x for k, x in dep.items()}
            v[j] = Gaussian(1)
            out.append(v)
    return out


def rank(columns: Iterable[Mapping]) -> int:
    basis = IncrementalBasis()
    for j, col in enumerate(columns):
        basis.add(col, j)
    return len(basis)
