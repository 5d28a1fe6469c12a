"""Square supermatrices of format n|n over the Grassmann coefficient ring.

Blocks ``J00`` and ``J11`` hold even entries, ``J01`` and ``J10`` odd ones.
Products are the ordinary block products of entries. The supertranspose sends
``(J00, J01, J10, J11)`` to ``(J00^T, J10^T, -J01^T, J11^T)``; with it the odd
symplectic condition reads ``J B J^st = B`` for ``B = [[0, 1], [1, 0]]``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import lru_cache

from oddsymp.expr import parse
from oddsymp.grassmann import (
    GeneratorSet,
    NotInvertible,
    ParityError,
    Q,
    SuperPolynomial,
)

Block = tuple[tuple[SuperPolynomial, ...], ...]

__all__ = [
    "SuperMatrix",
    "SymplecticCheck",
    "det_even",
    "inverse_even",
    "supertranspose",
    "berezinian",
    "is_symplectic",
    "check_berezinian_identity",
    "sample_symplectic",
    "format_matrix",
    "parse_matrix",
]


def _block(rows) -> Block:
    return tuple(tuple(r) for r in rows)


def _zeros(gens, n) -> Block:
    z = SuperPolynomial.zero(gens)
    return tuple((z,) * n for _ in range(n))


def _eye(gens, n) -> Block:
    z = SuperPolynomial.zero(gens)
    one = SuperPolynomial.one(gens)
    return tuple(tuple(one if i == j else z for j in range(n)) for i in range(n))


def _mat_mul(a: Block, b: Block) -> Block:
    n, m, k = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = a[i][0] * b[0][j]
            for t in range(1, m):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _mat_add(a: Block, b: Block) -> Block:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _mat_neg(a: Block) -> Block:
    return tuple(tuple(-x for x in r) for r in a)


def _transpose(a: Block) -> Block:
    return tuple(zip(*a)) if a else a


def _mat_eq(a: Block, b: Block) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


@dataclass(frozen=True)
class SuperMatrix:
    n: int
    J00: Block
    J01: Block
    J10: Block
    J11: Block

    def __post_init__(self):
        for name in ("J00", "J01", "J10", "J11"):
            blk = getattr(self, name)
            if len(blk) != self.n or any(len(r) != self.n for r in blk):
                raise ValueError(f"block {name} is not {self.n}x{self.n}")

    @property
    def gens(self) -> GeneratorSet:
        return self.J00[0][0].gens

    @classmethod
    def from_blocks(cls, J00, J01, J10, J11) -> SuperMatrix:
        return cls(len(J00), _block(J00), _block(J01), _block(J10), _block(J11))

    @classmethod
    def identity(cls, gens: GeneratorSet, n: int) -> SuperMatrix:
        return cls(n, _eye(gens, n), _zeros(gens, n), _zeros(gens, n), _eye(gens, n))

    @classmethod
    def block_diag(cls, A, D) -> SuperMatrix:
        A = _block(A)
        gens = A[0][0].gens
        return cls(len(A), A, _zeros(gens, len(A)), _zeros(gens, len(A)), _block(D))

    def check_parity(self) -> None:
        for name, want in (("J00", 0), ("J11", 0), ("J01", 1), ("J10", 1)):
            for row in getattr(self, name):
                for x in row:
                    if x and (not x.is_homogeneous() or x.parity() != want):
                        raise ParityError(f"{name} entry {x} must be {'odd' if want else 'even'}")

    def __matmul__(self, other: SuperMatrix) -> SuperMatrix:
        if other.n != self.n:
            raise ValueError("format mismatch")
        a, b = self, other
        return SuperMatrix(
            self.n,
            _mat_add(_mat_mul(a.J00, b.J00), _mat_mul(a.J01, b.J10)),
            _mat_add(_mat_mul(a.J00, b.J01), _mat_mul(a.J01, b.J11)),
            _mat_add(_mat_mul(a.J10, b.J00), _mat_mul(a.J11, b.J10)),
            _mat_add(_mat_mul(a.J10, b.J01), _mat_mul(a.J11, b.J11)),
        )

    def __eq__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        return self.n == other.n and all(
            _mat_eq(getattr(self, b), getattr(other, b)) for b in ("J00", "J01", "J10", "J11")
        )

    def __hash__(self):
        return hash((self.n, self.J00, self.J01, self.J10, self.J11))

    def map_entries(self, fn) -> SuperMatrix:
        return SuperMatrix(
            self.n,
            *(tuple(tuple(fn(x) for x in r) for r in getattr(self, b)) for b in ("J00", "J01", "J10", "J11")),
        )

    def __str__(self):
        return format_matrix(self)


def det_even(M) -> SuperPolynomial:
    """Determinant of a square matrix of even (hence commuting) entries."""
    M = _block(M)
    n = len(M)
    if n == 0:
        raise ValueError("empty matrix")
    for row in M:
        for x in row:
            if x and x.odd_part():
                raise ParityError(f"odd entry {x} in det_even")
    gens = M[0][0].gens

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset) -> SuperPolynomial:
        # expansion along ``row`` over the remaining columns
        if row == n:
            return SuperPolynomial.one(gens)
        acc = SuperPolynomial.zero(gens)
        sign = 1
        for c in sorted(cols):
            entry = M[row][c]
            if entry:
                sub = minor(row + 1, cols - {c})
                acc = acc + entry * sub if sign > 0 else acc - entry * sub
            sign = -sign
        return acc

    return minor(0, frozenset(range(n)))


def inverse_even(M) -> Block:
    """Inverse of an even matrix via the adjugate; det must have constant body."""
    M = _block(M)
    n = len(M)
    det = det_even(M)
    det_inv = det.inverse()
    if n == 1:
        return ((det_inv,),)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = tuple(tuple(M[r][c] for c in range(n) if c != i) for r in range(n) if r != j)
            cof = det_even(minor)
            if (i + j) & 1:
                cof = -cof
            row.append(cof * det_inv)
        out.append(tuple(row))
    return tuple(out)


def supertranspose(J: SuperMatrix) -> SuperMatrix:
    return SuperMatrix(J.n, _transpose(J.J00), _transpose(J.J10), _mat_neg(_transpose(J.J01)), _transpose(J.J11))


def berezinian(J: SuperMatrix) -> SuperPolynomial:
    """``det J00 / det(J11 - J10 J00^-1 J01)``; raises NotInvertible on a singular body."""
    try:
        inv00 = inverse_even(J.J00)
    except NotInvertible as exc:
        raise NotInvertible(f"J00 is not invertible: {exc}") from None
    schur = _mat_add(J.J11, _mat_neg(_mat_mul(_mat_mul(J.J10, inv00), J.J01)))
    try:
        schur_det_inv = det_even(schur).inverse()
    except NotInvertible as exc:
        raise NotInvertible(f"Schur complement is not invertible: {exc}") from None
    return det_even(J.J00) * schur_det_inv


@dataclass(frozen=True)
class SymplecticCheck:
    """Outcome of :func:`is_symplectic`; ``failures`` names every violated relation."""

    ok: bool
    failures: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def is_symplectic(J: SuperMatrix) -> SymplecticCheck:
    """Check ``J B J^st = B`` and the block relations it implies.

    Relations: ``sym00`` (J00 J01^T symmetric), ``skew11`` (J11 J10^T
    antisymmetric), ``unit01`` (J00 J11^T + J01 J10^T = 1), and ``schur``
    (J11 - J10 J00^-1 J01 = (J00^T)^-1, only when J00 is invertible).
    """
    gens = J.gens
    n = J.n
    eye = _eye(gens, n)
    zero = _zeros(gens, n)
    failures = []
    st = supertranspose(J)
    B = SuperMatrix(n, zero, eye, eye, zero)
    if not (J @ B @ st) == B:
        failures.append("JBJst=B")
    a = _mat_mul(J.J00, _transpose(J.J01))
    if not _mat_eq(a, _transpose(a)):
        failures.append("sym00")
    b = _mat_mul(J.J11, _transpose(J.J10))
    if not _mat_eq(b, _mat_neg(_transpose(b))):
        failures.append("skew11")
    c = _mat_add(_mat_mul(J.J00, _transpose(J.J11)), _mat_mul(J.J01, _transpose(J.J10)))
    if not _mat_eq(c, eye):
        failures.append("unit01")
    try:
        inv00 = inverse_even(J.J00)
    except NotInvertible:
        failures.append("schur")
    else:
        schur = _mat_add(J.J11, _mat_neg(_mat_mul(_mat_mul(J.J10, inv00), J.J01)))
        if not _mat_eq(schur, _transpose(inv00)):
            failures.append("schur")
    return SymplecticCheck(not failures, tuple(failures))


def check_berezinian_identity(J: SuperMatrix) -> bool:
    """``Ber J == (det J00)^2`` for a symplectic ``J``."""
    if not is_symplectic(J):
        raise ValueError("matrix is not odd symplectic")
    d = det_even(J.J00)
    return berezinian(J) == d * d


# sampling


def _random_rational(rng: random.Random, nonzero=False):
    while True:
        q = Q(rng.randint(-3, 3), rng.randint(1, 3))
        if q or not nonzero:
            return q


def _random_odd(rng: random.Random, gens: GeneratorSet) -> SuperPolynomial:
    m = gens.n_theta
    out = SuperPolynomial.zero(gens)
    for _ in range(rng.randint(1, 2)):
        k = 3 if m >= 3 and rng.random() < 0.3 else 1
        idx = rng.sample(range(1, m + 1), k)
        term = SuperPolynomial.const(gens, _random_rational(rng, nonzero=True))
        for t in idx:
            term = term * SuperPolynomial.gen(gens, gens.th(t))
        out = out + term
    return out


def _random_invertible(rng: random.Random, gens: GeneratorSet, n: int) -> Block:
    c = lambda q: SuperPolynomial.const(gens, q)  # noqa: E731
    lower = [[c(1 if i == j else (rng.randint(-2, 2) if i > j else 0)) for j in range(n)] for i in range(n)]
    upper = [[c(_random_rational(rng, True) if i == j else (rng.randint(-2, 2) if i < j else 0)) for j in range(n)] for i in range(n)]
    return _mat_mul(_block(lower), _block(upper))


def _factor_diag(rng, gens, n) -> SuperMatrix:
    G = _random_invertible(rng, gens, n)
    return SuperMatrix.block_diag(G, _transpose(inverse_even(G)))


def _factor_upper(rng, gens, n) -> SuperMatrix:
    z = SuperPolynomial.zero(gens)
    A = [[z] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if rng.random() < 0.6:
                A[i][j] = A[j][i] = _random_odd(rng, gens)
    return SuperMatrix(n, _eye(gens, n), _block(A), _zeros(gens, n), _eye(gens, n))


def _factor_lower(rng, gens, n) -> SuperMatrix:
    z = SuperPolynomial.zero(gens)
    C = [[z] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.6:
                v = _random_odd(rng, gens)
                C[i][j], C[j][i] = v, -v
    return SuperMatrix(n, _eye(gens, n), _zeros(gens, n), _block(C), _eye(gens, n))


def sample_symplectic(n: int, theta_budget: int, seed: int, gens: GeneratorSet | None = None) -> SuperMatrix:
    """Product of 3 to 8 random exactly-symplectic factors.

    Factor kinds: ``diag(G, (G^T)^-1)``, upper unipotent with a symmetric odd
    block, lower unipotent with an antisymmetric odd block. Without theta
    parameters only the first kind is used. Randomness is ``random.Random``
    (MT19937) seeded with ``seed``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if theta_budget < 0:
        raise ValueError("theta budget must be nonnegative")
    gens = gens or GeneratorSet(n, theta_budget)
    rng = random.Random(seed)
    makers = [_factor_diag]
    if theta_budget:
        makers += [_factor_upper, _factor_lower]
    J = SuperMatrix.identity(gens, n)
    for _ in range(rng.randint(3, 8)):
        J = J @ rng.choice(makers)(rng, gens, n)
    return J


# text format

_BLOCKS = ("J00", "J01", "J10", "J11")


def format_matrix(J: SuperMatrix) -> str:
    lines = [f"n={J.n} theta={J.gens.n_theta}"]
    for name in _BLOCKS:
        lines.append(name)
        for row in getattr(J, name):
            lines.append(" ; ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, gens: GeneratorSet | None = None) -> SuperMatrix:
    """Read the block text format written by :func:`format_matrix`.

    The header is ``n=<k>`` optionally followed by ``theta=<m>``; without
    ``theta`` the count is inferred from the largest ``th`` index present.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    if "n" not in header:
        raise ValueError("matrix header must start with n=<k>")
    n = int(header["n"])
    if gens is None:
        if "theta" in header:
            m = int(header["theta"])
        else:
            m = max((int(k) for k in re.findall(r"th(\d+)", text)), default=0)
        gens = GeneratorSet(n, m)
    blocks = {}
    pos = 1
    for name in _BLOCKS:
        if pos >= len(lines) or lines[pos] != name:
            raise ValueError(f"expected block label {name}")
        rows = []
        for r in range(n):
            cells = lines[pos + 1 + r].split(";")
            if len(cells) != n:
                raise ValueError(f"block {name} row {r + 1} has {len(cells)} entries, expected {n}")
            rows.append(tuple(parse(c, gens) for c in cells))
        blocks[name] = tuple(rows)
        pos += n + 1
    J = SuperMatrix(n, blocks["J00"], blocks["J01"], blocks["J10"], blocks["J11"])
    J.check_parity()
    return J
