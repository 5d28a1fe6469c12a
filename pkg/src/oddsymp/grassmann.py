"""Exact supercommutative polynomials over the Gaussian rationals.

Generators come in five kinds. Base coordinates ``x`` and fiber differentials
``dxi`` are even; fiber coordinates ``xi``, base differentials ``dx`` and the
auxiliary parameters ``th`` are odd. Odd generators are kept sorted in the
global order th < xi < dx (then by index); every reordering is recorded as a
sign on the coefficient. Derivatives by odd generators are left derivatives.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from oddsymp import kernel
from oddsymp.kernel import FIELD_BITS, FIELD_MASK

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

__all__ = [
    "Q",
    "Kind",
    "Generator",
    "GeneratorSet",
    "Gaussian",
    "Monomial",
    "SuperPolynomial",
    "GeneratorMismatch",
    "ParityError",
    "NotInvertible",
]


class GeneratorMismatch(ValueError):
    """Operands live over different generator sets, or a generator is foreign."""


class ParityError(ValueError):
    """A parity-homogeneous value was required."""


class NotInvertible(ArithmeticError):
    """The body of an even element is not a nonzero constant."""


class Kind(enum.Enum):
    X = "x"
    XI = "xi"
    DX = "dx"
    DXI = "dxi"
    THETA = "th"

    @property
    def parity(self) -> int:
        return 0 if self in (Kind.X, Kind.DXI) else 1


@dataclass(frozen=True, order=False)
class Generator:
    kind: Kind
    index: int

    @property
    def name(self) -> str:
        return f"{self.kind.value}{self.index}"

    @property
    def parity(self) -> int:
        return self.kind.parity

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class GeneratorSet:
    """Generators x1..xn, xi1..xin, dx1..dxn, dxi1..dxin and th1..thm."""

    n: int
    n_theta: int = 0

    def __post_init__(self):
        if self.n < 0 or self.n_theta < 0:
            raise ValueError("generator counts must be nonnegative")
        if 2 * self.n + 1 > 4096:
            raise ValueError("too many even generators")

    def x(self, i: int) -> Generator:
        return self._make(Kind.X, i)

    def xi(self, i: int) -> Generator:
        return self._make(Kind.XI, i)

    def dx(self, i: int) -> Generator:
        return self._make(Kind.DX, i)

    def dxi(self, i: int) -> Generator:
        return self._make(Kind.DXI, i)

    def th(self, i: int) -> Generator:
        return self._make(Kind.THETA, i)

    def _make(self, kind: Kind, i: int) -> Generator:
        g = Generator(kind, i)
        if g not in self:
            raise GeneratorMismatch(f"{g.name} is not in {self}")
        return g

    def __contains__(self, g) -> bool:
        if not isinstance(g, Generator):
            return False
        bound = self.n_theta if g.kind is Kind.THETA else self.n
        return 1 <= g.index <= bound

    def by_name(self, name: str) -> Generator:
        for kind in sorted(Kind, key=lambda k: -len(k.value)):
            if name.startswith(kind.value) and name[len(kind.value):].isdigit():
                return self._make(kind, int(name[len(kind.value):]))
        raise GeneratorMismatch(f"unknown symbol {name!r}")

    def of_kind(self, kind: Kind) -> list[Generator]:
        bound = self.n_theta if kind is Kind.THETA else self.n
        return [Generator(kind, i) for i in range(1, bound + 1)]

    def generators(self) -> list[Generator]:
        """Even generators first, then odd ones in global order."""
        out = []
        for kind in (Kind.X, Kind.DXI, Kind.THETA, Kind.XI, Kind.DX):
            out.extend(self.of_kind(kind))
        return out

    # storage layout

    def even_shift(self, g: Generator) -> int:
        if g.kind is Kind.X:
            field = g.index
        elif g.kind is Kind.DXI:
            field = self.n + g.index
        else:
            raise ParityError(f"{g.name} is odd")
        return field * FIELD_BITS

    def odd_bit(self, g: Generator) -> int:
        if g.kind is Kind.THETA:
            return g.index - 1
        if g.kind is Kind.XI:
            return self.n_theta + g.index - 1
        if g.kind is Kind.DX:
            return self.n_theta + self.n + g.index - 1
        raise ParityError(f"{g.name} is even")

    def kind_mask(self, kind: Kind) -> int:
        """Bitmask of all odd generators of one kind."""
        m = 0
        for g in self.of_kind(kind):
            m |= 1 << self.odd_bit(g)
        return m

    def kind_even_mask(self, kind: Kind) -> int:
        """Packed-exponent mask covering the fields of one even kind."""
        m = 0
        for g in self.of_kind(kind):
            m |= FIELD_MASK << self.even_shift(g)
        return m

    def __str__(self) -> str:
        return f"GeneratorSet(n={self.n}, n_theta={self.n_theta})"


class Gaussian:
    """An exact Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Q(re)
        self.im = Q(im)

    @classmethod
    def coerce(cls, v) -> Gaussian:
        if isinstance(v, Gaussian):
            return v
        if isinstance(v, complex):
            raise TypeError("floating complex values are not exact")
        return cls(v, 0)

    def __add__(self, o):
        o = Gaussian.coerce(o)
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-Gaussian.coerce(o))

    def __rsub__(self, o):
        return Gaussian.coerce(o) - self

    def __mul__(self, o):
        o = Gaussian.coerce(o)
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> Gaussian:
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("Gaussian zero")
        return Gaussian(self.re / norm, -self.im / norm)

    def __truediv__(self, o):
        return self * Gaussian.coerce(o).inverse()

    def __rtruediv__(self, o):
        return Gaussian.coerce(o) * self.inverse()

    def conjugate(self) -> Gaussian:
        return Gaussian(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        try:
            o = Gaussian.coerce(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}+{self.im}*i)"


@dataclass(frozen=True)
class Monomial:
    """Public view of a stored monomial: even exponents and sorted odd factors."""

    even: tuple[tuple[Generator, int], ...]
    odd: tuple[Generator, ...]

    @property
    def parity(self) -> int:
        return len(self.odd) & 1

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.even) + len(self.odd)


def _scalar_terms(c) -> dict:
    """Term dictionary of a constant (int, rational or Gaussian)."""
    c = Gaussian.coerce(c)
    t = {}
    if c.re:
        t[(0, 0)] = c.re
    if c.im:
        t[(1, 0)] = c.im
    return t


class SuperPolynomial:
    """Immutable polynomial in the generators of a :class:`GeneratorSet`."""

    __slots__ = ("gens", "_t", "_hash")

    def __init__(self, gens: GeneratorSet, terms: Mapping | None = None):
        self.gens = gens
        self._t = {k: c for k, c in terms.items() if c} if terms else {}
        self._hash = None

    @classmethod
    def _raw(cls, gens, terms) -> SuperPolynomial:
        p = cls.__new__(cls)
        p.gens = gens
        p._t = terms
        p._hash = None
        return p

    # construction

    @classmethod
    def zero(cls, gens: GeneratorSet) -> SuperPolynomial:
        return cls._raw(gens, {})

    @classmethod
    def const(cls, gens: GeneratorSet, c) -> SuperPolynomial:
        return cls._raw(gens, _scalar_terms(c))

    @classmethod
    def one(cls, gens: GeneratorSet) -> SuperPolynomial:
        return cls.const(gens, 1)

    @classmethod
    def imag(cls, gens: GeneratorSet) -> SuperPolynomial:
        return cls._raw(gens, {(1, 0): Q(1)})

    @classmethod
    def gen(cls, gens: GeneratorSet, g: Generator | str) -> SuperPolynomial:
        if isinstance(g, str):
            g = gens.by_name(g)
        elif g not in gens:
            raise GeneratorMismatch(f"{g} is not in {gens}")
        if g.parity:
            key = (0, 1 << gens.odd_bit(g))
        else:
            key = (1 << gens.even_shift(g), 0)
        return cls._raw(gens, {key: Q(1)})

    @classmethod
    def parse(cls, text: str, gens: GeneratorSet) -> SuperPolynomial:
        from oddsymp.expr import parse

        return parse(text, gens)

    # arithmetic

    def _coerce(self, other) -> SuperPolynomial:
        if isinstance(other, SuperPolynomial):
            if other.gens != self.gens:
                raise GeneratorMismatch(f"{self.gens} vs {other.gens}")
            return other
        if isinstance(other, (int, Fraction, Gaussian)) or type(other) is Q:
            return SuperPolynomial.const(self.gens, other)
        raise TypeError(f"cannot combine SuperPolynomial with {type(other).__name__}")

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return SuperPolynomial._raw(self.gens, kernel.add_terms(self._t, o._t))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return SuperPolynomial._raw(self.gens, kernel.add_terms(self._t, o._t, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return SuperPolynomial._raw(self.gens, {k: -c for k, c in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, int) or type(other) in (Fraction, Q):
            if not other:
                return SuperPolynomial.zero(self.gens)
            other = Q(other)
            return SuperPolynomial._raw(self.gens, {k: c * other for k, c in self._t.items()})
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return SuperPolynomial._raw(self.gens, kernel.mul_terms(self._t, o._t))

    def __rmul__(self, other):
        # scalars are even, so left and right multiplication agree
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, Gaussian):
            return self * SuperPolynomial.const(self.gens, other.inverse())
        if isinstance(other, int) or type(other) in (Fraction, Q):
            return self * (Q(1) / Q(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        result = SuperPolynomial.one(self.gens)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, SuperPolynomial):
            return self.gens == other.gens and self._t == other._t
        try:
            return self._t == self._coerce(other)._t
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self._t.items())))
        return self._hash

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def __str__(self):
        from oddsymp.expr import format_poly

        return format_poly(self)

    def __repr__(self):
        return f"SuperPolynomial({str(self)!r})"

    # inspection

    @property
    def is_zero(self) -> bool:
        return not self._t

    def term_keys(self):
        return self._t.keys()

    def raw_terms(self) -> dict:
        """Copy of the internal term dictionary."""
        return dict(self._t)

    def parities(self) -> set[int]:
        return {o.bit_count() & 1 for _, o in self._t}

    def parity(self) -> int:
        """Parity of a homogeneous polynomial; zero counts as even."""
        ps = self.parities()
        if len(ps) > 1:
            raise ParityError(f"{self} is not parity-homogeneous")
        return ps.pop() if ps else 0

    def is_homogeneous(self) -> bool:
        return len(self.parities()) <= 1

    def even_part(self) -> SuperPolynomial:
        return SuperPolynomial._raw(self.gens, {k: c for k, c in self._t.items() if not k[1].bit_count() & 1})

    def odd_part(self) -> SuperPolynomial:
        return SuperPolynomial._raw(self.gens, {k: c for k, c in self._t.items() if k[1].bit_count() & 1})

    def monomial(self, key) -> Monomial:
        e, o = key
        gens = self.gens
        even = []
        for kind in (Kind.X, Kind.DXI):
            for g in gens.of_kind(kind):
                k = (e >> gens.even_shift(g)) & FIELD_MASK
                if k:
                    even.append((g, k))
        odd = tuple(g for g in gens.generators() if g.parity and o >> gens.odd_bit(g) & 1)
        return Monomial(tuple(even), odd)

    def items(self) -> Iterator[tuple[Monomial, Gaussian]]:
        """Monomials with their Gaussian coefficients."""
        merged: dict = {}
        for (e, o), c in self._t.items():
            re, im = merged.get((e & ~FIELD_MASK, o), (Q(0), Q(0)))
            if e & FIELD_MASK:
                im += c
            else:
                re += c
            merged[(e & ~FIELD_MASK, o)] = (re, im)
        for key, (re, im) in merged.items():
            yield self.monomial(key), Gaussian(re, im)

    def constant_term(self) -> Gaussian:
        return Gaussian(self._t.get((0, 0), 0), self._t.get((1, 0), 0))

    def is_constant(self) -> bool:
        return all(o == 0 and not (e & ~FIELD_MASK) for e, o in self._t)

    def body(self) -> SuperPolynomial:
        """Part free of odd generators."""
        return SuperPolynomial._raw(self.gens, {k: c for k, c in self._t.items() if not k[1]})

    def support_kinds(self) -> set[Kind]:
        """Kinds of generators that occur somewhere in the polynomial."""
        gens = self.gens
        kinds = set()
        for kind in Kind:
            if kind.parity:
                mask = gens.kind_mask(kind)
                if any(o & mask for _, o in self._t):
                    kinds.add(kind)
            else:
                mask = gens.kind_even_mask(kind)
                if any(e & mask for e, _ in self._t):
                    kinds.add(kind)
        return kinds

    def depends_only_on(self, kinds: Iterable[Kind]) -> bool:
        return self.support_kinds() <= set(kinds)

    def filter(self, pred) -> SuperPolynomial:
        """Keep the terms whose raw key ``(even, odd)`` satisfies ``pred``."""
        return SuperPolynomial._raw(self.gens, {k: c for k, c in self._t.items() if pred(k)})

    # calculus

    def derive(self, g: Generator | str) -> SuperPolynomial:
        """Left derivative by ``g``."""
        gens = self.gens
        if isinstance(g, str):
            g = gens.by_name(g)
        if g not in gens:
            raise GeneratorMismatch(f"{g} is not in {gens}")
        if g.parity:
            return SuperPolynomial._raw(gens, kernel.derive_odd(self._t, gens.odd_bit(g)))
        return SuperPolynomial._raw(gens, kernel.derive_even(self._t, gens.even_shift(g)))

    def substitute(self, mapping: Mapping[Generator, SuperPolynomial]) -> SuperPolynomial:
        """Ring homomorphism sending each listed generator to its image.

        Generators absent from ``mapping`` are fixed. Images must share the
        generator set and carry the parity of the generator they replace.
        """
        gens = self.gens
        even_img = {}
        odd_img = {}
        for g, img in mapping.items():
            if g not in gens:
                raise GeneratorMismatch(f"{g} is not in {gens}")
            img = self._coerce(img)
            if img and (not img.is_homogeneous() or img.parity() != g.parity):
                raise ParityError(f"image of {g.name} has the wrong parity: {img}")
            if g.parity:
                odd_img[gens.odd_bit(g)] = img._t
            else:
                even_img[gens.even_shift(g)] = img._t
        if not mapping:
            return self

        mul = kernel.mul_terms
        power_cache: dict = {}

        def even_factor(shift, k):
            key = (shift, k)
            hit = power_cache.get(key)
            if hit is None:
                if k == 1:
                    hit = even_img[shift]
                else:
                    hit = mul(even_factor(shift, k - 1), even_img[shift])
                power_cache[key] = hit
            return hit

        out: dict = {}
        for (e, o), c in self._t.items():
            kept_e = e & FIELD_MASK
            prod = {(kept_e, 0): c}
            rest = e >> FIELD_BITS
            shift = FIELD_BITS
            while rest:
                k = rest & FIELD_MASK
                if k:
                    if shift in even_img:
                        prod = mul(prod, even_factor(shift, k))
                    else:
                        prod = {(pe + (k << shift), po): pc for (pe, po), pc in prod.items()}
                rest >>= FIELD_BITS
                shift += FIELD_BITS
            bits = o
            while bits and prod:
                low = bits & -bits
                b = low.bit_length() - 1
                prod = mul(prod, odd_img[b] if b in odd_img else {(0, low): Q(1)})
                bits ^= low
            out = kernel.add_terms(out, prod)
        return SuperPolynomial._raw(gens, out)

    def berezin(self, odd_gens: Iterable[Generator]) -> SuperPolynomial:
        """Berezin integral over ``odd_gens`` in the listed order.

        Each term is written as ``rest * g1*g2*...*gk`` with the listed product
        on the right; the integral returns the sum of the ``rest`` factors.
        Terms missing any listed generator are dropped.
        """
        gens = self.gens
        bits = []
        for g in odd_gens:
            if g not in gens:
                raise GeneratorMismatch(f"{g} is not in {gens}")
            if not g.parity:
                raise ParityError(f"cannot Berezin-integrate over even {g.name}")
            bits.append(gens.odd_bit(g))
        if len(set(bits)) != len(bits):
            return SuperPolynomial.zero(gens)
        full = 0
        order_sign = 1
        for b in bits:
            # building g1*...*gk left to right from the sorted product
            order_sign *= kernel.odd_sign(full, 1 << b)
            full |= 1 << b
        out = {}
        for (e, o), c in self._t.items():
            if o & full != full:
                continue
            rest = o ^ full
            sign = kernel.odd_sign(rest, full) * order_sign
            out[(e, rest)] = c if sign > 0 else -c
        return SuperPolynomial._raw(gens, out)

    # invertibility and exponentials

    def inverse(self) -> SuperPolynomial:
        """Inverse of an element whose odd-free part is a nonzero constant."""
        body = self.body()
        if not body.is_constant() or body.is_zero:
            raise NotInvertible(f"body of {self} is not a nonzero constant")
        c_inv = body.constant_term().inverse()
        unit = self * SuperPolynomial.const(self.gens, c_inv)
        nil = unit - 1
        result = SuperPolynomial.one(self.gens)
        term = SuperPolynomial.one(self.gens)
        while True:
            term = -(term * nil)
            if term.is_zero:
                break
            result = result + term
        return result * SuperPolynomial.const(self.gens, c_inv)

    def is_nilpotent(self) -> bool:
        return all(o for _, o in self._t)

    def exp_nilpotent(self) -> SuperPolynomial:
        """``exp`` of an element with no odd-free terms; the series is finite."""
        if not self.is_nilpotent():
            raise ValueError(f"exp of non-nilpotent {self} is not polynomial")
        result = SuperPolynomial.one(self.gens)
        term = SuperPolynomial.one(self.gens)
        k = 0
        while True:
            k += 1
            term = term * self * Q(1, k)
            if term.is_zero:
                return result
            result = result + term
