"""Text grammar for super polynomials.

Atoms are ``x<k>``, ``xi<k>``, ``dx<k>``, ``dxi<k>``, ``th<k>``, ``i``,
integers and ``p/q`` rational literals. Operators are ``+ - * ^`` with
parentheses. ``^`` takes a nonnegative integer exponent; odd bases give zero
from the second power on.

The printer emits terms in graded order (higher total degree first, ties
broken lexicographically on the exponent vector) and is the inverse of the
parser on canonical forms.
"""

from __future__ import annotations

import re

from oddsymp.grassmann import (
    FIELD_MASK,
    GeneratorMismatch,
    GeneratorSet,
    Kind,
    Q,
    SuperPolynomial,
)

__all__ = ["ParseError", "parse", "format_poly", "format_scalar"]


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]+\d*)|(.))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            out.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^()/":
                raise ParseError(f"unexpected character {ch!r}", start)
            out.append((ch, ch, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, gens: GeneratorSet):
        self.toks = _tokenize(text)
        self.i = 0
        self.gens = gens

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        value = self.term()
        while self.peek()[0] in "+-" and self.peek()[0] != "end":
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] == "*":
            self.take()
            value = value * self.unary()
        return value

    def unary(self):
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take("num")
            base = base ** int(tok[1])
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            if self.peek()[0] == "/":
                self.take()
                den = self.take("num")
                if int(den[1]) == 0:
                    raise ParseError("zero denominator", den[2])
                return SuperPolynomial.const(self.gens, Q(int(text), int(den[1])))
            return SuperPolynomial.const(self.gens, int(text))
        if kind == "name":
            if text == "i":
                return SuperPolynomial.imag(self.gens)
            try:
                g = self.gens.by_name(text)
            except GeneratorMismatch:
                raise ParseError(f"unknown symbol {text!r}", pos) from None
            return SuperPolynomial.gen(self.gens, g)
        if kind == "(":
            value = self.expr()
            self.take(")")
            return value
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def parse(text: str, gens: GeneratorSet) -> SuperPolynomial:
    p = _Parser(text, gens)
    value = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return value


def format_scalar(q) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_PRINT_KINDS = (Kind.X, Kind.DXI, Kind.THETA, Kind.XI, Kind.DX)


def _monomial_factors(gens: GeneratorSet, e: int, o: int):
    """Exponent vector (for ordering) and printed factors of a stored key."""
    vec = []
    factors = []
    for kind in _PRINT_KINDS:
        for g in gens.of_kind(kind):
            if kind.parity:
                k = (o >> gens.odd_bit(g)) & 1
            else:
                k = (e >> gens.even_shift(g)) & FIELD_MASK
            vec.append(k)
            if k == 1:
                factors.append(g.name)
            elif k:
                factors.append(f"{g.name}^{k}")
    return vec, factors


def format_poly(p: SuperPolynomial) -> str:
    if p.is_zero:
        return "0"
    merged: dict = {}
    for (e, o), c in p.raw_terms().items():
        slot = merged.setdefault((e & ~FIELD_MASK, o), [Q(0), Q(0)])
        slot[1 if e & FIELD_MASK else 0] += c
    rows = []
    for (e, o), (re_, im) in merged.items():
        vec, factors = _monomial_factors(p.gens, e, o)
        rows.append((-sum(vec), [-k for k in vec], factors, re_, im))
    rows.sort(key=lambda r: (r[0], r[1]))
    parts = []
    for _, _, factors, re_, im in rows:
        negative, coeff = _format_coefficient(re_, im)
        body = "*".join(factors)
        if not body:
            text = coeff or "1"
        elif not coeff:
            text = body
        else:
            text = f"{coeff}*{body}"
        parts.append((negative, text))
    out = ("-" if parts[0][0] else "") + parts[0][1]
    for negative, text in parts[1:]:
        out += (" - " if negative else " + ") + text
    return out


def _format_coefficient(re_, im):
    """Return ``(negative, magnitude text)``; empty text stands for 1."""
    if not im:
        neg = re_ < 0
        mag = -re_ if neg else re_
        return neg, "" if mag == 1 else format_scalar(mag)
    if not re_:
        neg = im < 0
        mag = -im if neg else im
        return neg, "i" if mag == 1 else f"{format_scalar(mag)}*i"
    imag = "i" if abs(im) == 1 else f"{format_scalar(abs(im))}*i"
    return False, f"({format_scalar(re_)}{'-' if im < 0 else '+'}{imag})"
