"""Darboux charts on ΠT*M, canonical transformations and pullbacks.

A transformation is stored through its pullback of coordinates: ``F*x_i`` and
``F*xi_i`` as polynomials in the same chart. Composition follows maps, so
``compose(F, G)`` is "F after G" and ``pullback(compose(F, G)) =
pullback(G) o pullback(F)``.

The Jacobian is the supermatrix of left derivatives with rows indexed by the
source variables (x, then xi) and columns by the images (F*x, then F*xi).
With this layout the chain rule is the plain matrix product, so the
Berezinian is a strict cocycle.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from math import factorial

from oddsymp.calculus import exterior_d, odd_bracket, omega
from oddsymp.expr import parse
from oddsymp.grassmann import (
    GeneratorMismatch,
    GeneratorSet,
    Kind,
    ParityError,
    Q,
    SuperPolynomial,
)
from oddsymp.superlinalg import SuperMatrix, berezinian, det_even

__all__ = [
    "Chart",
    "ObjectKind",
    "GeometricObject",
    "CanonicalTransformation",
    "NotCanonical",
    "FlowNotNilpotent",
    "make_identity",
    "make_diffeo",
    "make_fiber_shift",
    "make_hamiltonian_flow",
    "compose",
    "invert",
    "jacobian",
    "pullback",
    "transformation_from_records",
    "load_transformation",
]


class NotCanonical(ValueError):
    """The proposed map does not preserve the symplectic form or is not invertible."""


class FlowNotNilpotent(ValueError):
    """The Hamiltonian vector field does not terminate on the coordinates."""


@dataclass(frozen=True)
class Chart:
    """Darboux chart with ``n`` coordinate pairs and ``n_theta`` odd parameters."""

    n: int
    n_theta: int = 0
    name: str = "darboux"

    @property
    def gens(self) -> GeneratorSet:
        return GeneratorSet(self.n, self.n_theta)

    def poly(self, text: str) -> SuperPolynomial:
        return parse(text, self.gens)

    def omega(self) -> SuperPolynomial:
        return omega(self.gens)


class ObjectKind(enum.Enum):
    FIELD = "multivector-field"
    DENSITY = "multivector-density"
    FORM = "form"
    VOLUME = "volume-form"


_FUNCTION_KINDS = {Kind.X, Kind.XI, Kind.THETA}


@dataclass(frozen=True)
class GeometricObject:
    """A polynomial body together with the kind that fixes its transformation law.

    ``DENSITY`` covers multivector densities on M, half-densities on ΠT*M and
    E1 representatives alike: the body is the coefficient of ``Dx``.
    """

    chart: Chart
    kind: ObjectKind
    body: SuperPolynomial

    def __post_init__(self):
        if self.body.gens != self.chart.gens:
            raise GeneratorMismatch("body does not live in the chart")
        if self.kind is not ObjectKind.FORM and not self.body.depends_only_on(_FUNCTION_KINDS):
            raise ValueError(f"{self.kind.value} body may only involve x, xi and th")
        if self.kind is ObjectKind.VOLUME:
            b = self.body.body()
            if self.body.odd_part() or not b.is_constant() or not b:
                raise ValueError("volume form needs an even body with nonzero constant part")

    @classmethod
    def field(cls, chart, body):
        return cls(chart, ObjectKind.FIELD, _as_poly(chart, body))

    @classmethod
    def density(cls, chart, body):
        return cls(chart, ObjectKind.DENSITY, _as_poly(chart, body))

    @classmethod
    def form(cls, chart, body):
        return cls(chart, ObjectKind.FORM, _as_poly(chart, body))

    @classmethod
    def volume(cls, chart, body=1):
        return cls(chart, ObjectKind.VOLUME, _as_poly(chart, body))

    def with_body(self, body: SuperPolynomial) -> GeometricObject:
        return GeometricObject(self.chart, self.kind, body)


def _as_poly(chart: Chart, body) -> SuperPolynomial:
    if isinstance(body, SuperPolynomial):
        return body
    if isinstance(body, str):
        return chart.poly(body)
    return SuperPolynomial.const(chart.gens, body)


@dataclass(frozen=True)
class CanonicalTransformation:
    chart: Chart
    x_images: tuple[SuperPolynomial, ...]
    xi_images: tuple[SuperPolynomial, ...]
    kind: str = field(default="composite", compare=False)
    records: tuple = field(default=(), compare=False)
    _inverse: CanonicalTransformation | None = field(default=None, compare=False, repr=False)

    @property
    def gens(self) -> GeneratorSet:
        return self.chart.gens

    def substitution(self) -> dict:
        gens = self.gens
        sub = {}
        for i in range(1, gens.n + 1):
            sub[gens.x(i)] = self.x_images[i - 1]
            sub[gens.xi(i)] = self.xi_images[i - 1]
        return sub

    def form_substitution(self) -> dict:
        """Coordinates and their differentials, the latter by the chain rule."""
        gens = self.gens
        sub = self.substitution()
        for i in range(1, gens.n + 1):
            sub[gens.dx(i)] = exterior_d(self.x_images[i - 1])
            sub[gens.dxi(i)] = exterior_d(self.xi_images[i - 1])
        return sub

    def preserves_omega(self) -> bool:
        w = omega(self.gens)
        return w.substitute(self.form_substitution()) == w

    def is_identity(self) -> bool:
        gens = self.gens
        return all(
            self.x_images[i - 1] == SuperPolynomial.gen(gens, gens.x(i))
            and self.xi_images[i - 1] == SuperPolynomial.gen(gens, gens.xi(i))
            for i in range(1, gens.n + 1)
        )

    def __str__(self):
        parts = [f"x{i + 1} -> {p}" for i, p in enumerate(self.x_images)]
        parts += [f"xi{i + 1} -> {p}" for i, p in enumerate(self.xi_images)]
        return f"{self.kind}: " + ", ".join(parts)


def _coords(chart: Chart):
    gens = chart.gens
    xs = tuple(SuperPolynomial.gen(gens, gens.x(i)) for i in range(1, chart.n + 1))
    xis = tuple(SuperPolynomial.gen(gens, gens.xi(i)) for i in range(1, chart.n + 1))
    return xs, xis


def make_identity(chart: Chart) -> CanonicalTransformation:
    xs, xis = _coords(chart)
    return CanonicalTransformation(chart, xs, xis, "identity", ())


def _check(F: CanonicalTransformation) -> CanonicalTransformation:
    for p in F.x_images:
        if p and (not p.is_homogeneous() or p.parity()):
            raise ParityError(f"image of an even coordinate must be even: {p}")
    for p in F.xi_images:
        if p and (not p.is_homogeneous() or not p.parity()):
            raise ParityError(f"image of an odd coordinate must be odd: {p}")
    if not F.preserves_omega():
        raise NotCanonical(f"{F} does not preserve omega")
    return F


def make_diffeo(chart: Chart, phi, phi_inv) -> CanonicalTransformation:
    """Lift the polynomial diffeomorphism ``x -> phi(x)`` of M to ΠT*M.

    ``phi_inv`` must be its polynomial inverse. Fibers transform as covectors:
    ``xi_i -> sum_k (d phi_inv_k / d y_i)(phi(x)) xi_k``.
    """
    gens = chart.gens
    phi = tuple(_as_poly(chart, p) for p in phi)
    psi = tuple(_as_poly(chart, p) for p in phi_inv)
    if len(phi) != chart.n or len(psi) != chart.n:
        raise ValueError("diffeomorphism needs one image per base coordinate")
    allowed = {Kind.X, Kind.THETA}
    for p in phi + psi:
        if not p.depends_only_on(allowed):
            raise ValueError(f"diffeomorphism component {p} may only involve x and th")
        if p and (not p.is_homogeneous() or p.parity()):
            raise ParityError(f"diffeomorphism component {p} must be even")
    xs, xis = _coords(chart)
    to_phi = {gens.x(i): phi[i - 1] for i in range(1, chart.n + 1)}
    to_psi = {gens.x(i): psi[i - 1] for i in range(1, chart.n + 1)}
    for k in range(chart.n):
        if psi[k].substitute(to_phi) != xs[k] or phi[k].substitute(to_psi) != xs[k]:
            raise NotCanonical("phi_inv is not the inverse of phi")
    xi_images = []
    for i in range(1, chart.n + 1):
        acc = SuperPolynomial.zero(gens)
        for k in range(1, chart.n + 1):
            coeff = psi[k - 1].derive(gens.x(i)).substitute(to_phi)
            acc = acc + coeff * xis[k - 1]
        xi_images.append(acc)
    record = {"type": "diffeo", "map": [str(p) for p in phi], "inverse": [str(p) for p in psi]}
    F = CanonicalTransformation(chart, phi, tuple(xi_images), "diffeo", (record,))
    return _check(F)


def make_fiber_shift(chart: Chart, Phi) -> CanonicalTransformation:
    """``x -> x``, ``xi_a -> xi_a + dPhi/dx_a`` for an odd ``Phi(x, th)``."""
    gens = chart.gens
    Phi = _as_poly(chart, Phi)
    if not Phi.depends_only_on({Kind.X, Kind.THETA}):
        raise ValueError(f"shift potential {Phi} may only involve x and th")
    if Phi and (not Phi.is_homogeneous() or not Phi.parity()):
        raise ParityError(f"shift potential {Phi} must be odd")
    xs, xis = _coords(chart)
    xi_images = tuple(xis[a - 1] + Phi.derive(gens.x(a)) for a in range(1, chart.n + 1))
    F = CanonicalTransformation(chart, xs, xi_images, "fiber-shift", ({"type": "shift", "phi": str(Phi)},))
    return _check(F)


@dataclass(frozen=True)
class NilpotencyCertificate:
    """Why the exponential series of a Hamiltonian field is finite.

    ``reason`` is ``"theta"`` when every term of H carries an odd parameter
    (each application adds one, so ``bound = n_theta + 1`` suffices), or
    ``"terminated"`` when the iterates on every coordinate reached zero
    within ``bound`` steps.
    """

    reason: str
    bound: int
    steps: int


def flow_series(H: SuperPolynomial, z: SuperPolynomial, bound: int) -> tuple[SuperPolynomial, int]:
    """``sum_k X_H^k(z) / k!`` and the number of nonzero iterates used."""
    total = z
    term = z
    for k in range(1, bound + 1):
        term = odd_bracket(H, term)
        if term.is_zero:
            return total, k - 1
        total = total + term * Q(1, factorial(k))
    raise FlowNotNilpotent(f"series for {z} did not terminate within {bound} steps")


def make_hamiltonian_flow(chart: Chart, H) -> tuple[CanonicalTransformation, NilpotencyCertificate]:
    """Time-one flow of the Hamiltonian field ``X_H = {H, -}``.

    H must be odd: the bracket is odd, so only odd Hamiltonians give
    parity-preserving flows. The series is summed exactly.
    """
    gens = chart.gens
    H = _as_poly(chart, H)
    if not H.depends_only_on(_FUNCTION_KINDS):
        raise ValueError("Hamiltonian may only involve x, xi and th")
    if H and (not H.is_homogeneous() or not H.parity()):
        raise ParityError(f"Hamiltonian {H} must be odd to generate a canonical transformation")
    th_mask = gens.kind_mask(Kind.THETA)
    if all(o & th_mask for _, o in H.term_keys()):
        reason, bound = "theta", gens.n_theta + 1
    else:
        reason, bound = "terminated", gens.n_theta + 2 * gens.n + 2
    xs, xis = _coords(chart)
    steps = 0
    x_images, xi_images = [], []
    for z, out in [(x, x_images) for x in xs] + [(xi, xi_images) for xi in xis]:
        img, used = flow_series(H, z, bound)
        steps = max(steps, used)
        out.append(img)
    F = CanonicalTransformation(chart, tuple(x_images), tuple(xi_images), "flow", ({"type": "flow", "hamiltonian": str(H)},))
    return _check(F), NilpotencyCertificate(reason, bound, steps)


def compose(F: CanonicalTransformation, G: CanonicalTransformation) -> CanonicalTransformation:
    """``F`` after ``G``: ``(F o G)* = G* o F*``."""
    if F.chart != G.chart:
        raise GeneratorMismatch("charts differ")
    sub = G.substitution()
    return CanonicalTransformation(
        F.chart,
        tuple(p.substitute(sub) for p in F.x_images),
        tuple(p.substitute(sub) for p in F.xi_images),
        "composite",
        F.records + G.records,
    )


def _invert_record(chart: Chart, rec: dict) -> CanonicalTransformation:
    kind = rec["type"]
    if kind == "diffeo":
        return make_diffeo(chart, rec["inverse"], rec["map"])
    if kind == "shift":
        return make_fiber_shift(chart, -chart.poly(rec["phi"]))
    if kind == "flow":
        return make_hamiltonian_flow(chart, -chart.poly(rec["hamiltonian"]))[0]
    raise ValueError(f"unknown record type {kind!r}")


def invert(F: CanonicalTransformation) -> CanonicalTransformation:
    """Inverse of a generator or of a composite of generators."""
    if F.kind == "identity" or not F.records and F.is_identity():
        return F
    if not F.records:
        raise ValueError("only generated transformations can be inverted")
    out = make_identity(F.chart)
    for rec in F.records:
        # (R1 o ... o Rk)^-1 = Rk^-1 o ... o R1^-1
        out = compose(_invert_record(F.chart, rec), out)
    return out


def jacobian(F: CanonicalTransformation) -> SuperMatrix:
    gens = F.gens
    n = F.chart.n
    xv = [gens.x(i) for i in range(1, n + 1)]
    xiv = [gens.xi(i) for i in range(1, n + 1)]

    def blk(images, vars_):
        return tuple(tuple(images[j].derive(vars_[i]) for j in range(n)) for i in range(n))

    return SuperMatrix(n, blk(F.x_images, xv), blk(F.xi_images, xv), blk(F.x_images, xiv), blk(F.xi_images, xiv))


def pullback(F: CanonicalTransformation, obj: GeometricObject) -> GeometricObject:
    """Kind-dependent pullback.

    Fields: substitution. Densities: substitution times ``det J00``. Forms:
    substitution extended to differentials. Volume forms: substitution
    times ``Ber J``.
    """
    if obj.chart != F.chart:
        raise GeneratorMismatch("object and transformation live in different charts")
    if obj.kind is ObjectKind.FORM:
        return obj.with_body(obj.body.substitute(F.form_substitution()))
    body = obj.body.substitute(F.substitution())
    if obj.kind is ObjectKind.DENSITY:
        body = body * det_even(jacobian(F).J00)
    elif obj.kind is ObjectKind.VOLUME:
        body = body * berezinian(jacobian(F))
    return obj.with_body(body)


def transformation_from_records(chart: Chart, records) -> CanonicalTransformation:
    """Build ``R1 o R2 o ... o Rk`` from generator records (Rk acts first on points)."""
    out = make_identity(chart)
    for rec in records:
        kind = rec.get("type")
        if kind == "diffeo":
            step = make_diffeo(chart, rec["map"], rec["inverse"])
        elif kind == "shift":
            step = make_fiber_shift(chart, rec["phi"])
        elif kind == "flow":
            step = make_hamiltonian_flow(chart, rec["hamiltonian"])[0]
        else:
            raise ValueError(f"unknown record type {kind!r}")
        out = compose(out, step)
    return out


def load_transformation(text: str) -> CanonicalTransformation:
    """Parse the JSON transformation file: ``{"n":..,"theta":..,"records":[..]}``."""
    data = json.loads(text)
    chart = Chart(int(data["n"]), int(data.get("theta", 0)))
    return transformation_from_records(chart, data.get("records", []))


def dump_transformation(F: CanonicalTransformation) -> str:
    return json.dumps({"n": F.chart.n, "theta": F.chart.n_theta, "records": list(F.records)}, indent=2)
