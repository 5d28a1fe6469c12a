"""Seeded property suites and their reports.

Trial ``k`` of a run draws from ``random.Random(seed * 1_000_003 + k)``
(MT19937), so any failure replays from ``(suite, seed, offset)`` alone.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from oddsymp import bv, spectral
from oddsymp.calculus import bv_laplacian, darboux_theta, exterior_d, omega
from oddsymp.geometry import (
    Chart,
    GeometricObject,
    compose,
    dump_transformation,
    make_diffeo,
    make_fiber_shift,
    pullback,
)
from oddsymp.grassmann import Kind, Q, SuperPolynomial
from oddsymp.randgen import (
    BASE_FORM_KINDS,
    FORM_KINDS,
    FUNCTION_KINDS,
    random_admissible_form,
    random_poly,
    random_transformation,
    random_triangular_diffeo,
    trial_rng,
)
from oddsymp.superlinalg import (
    berezinian,
    check_berezinian_identity,
    format_matrix,
    is_symplectic,
    sample_symplectic,
)

SCHEMA = "oddsymp.check-report/1"
SUITES = (
    "berezinian",
    "nilpotency",
    "homotopy",
    "spectral",
    "delta-invariance",
    "lie-algebra",
    "fourier",
    "conventions",
    "non-invariance",
)


class UnknownSuite(ValueError):
    pass


@dataclass(frozen=True)
class CheckSuiteConfig:
    suite: str
    trials: int = 20
    seed: int = 0
    n_max: int = 2
    degree_max: int = 3
    theta_budget: int = 2
    offset: int = 0

    def __post_init__(self):
        if self.suite not in SUITES:
            raise UnknownSuite(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n_max < 1:
            raise ValueError("n-max must be at least 1")


@dataclass
class Failure:
    offset: int
    check: str
    counterexample: dict

    def to_dict(self) -> dict:
        return {"offset": self.offset, "check": self.check, "counterexample": self.counterexample}


@dataclass
class CheckReport:
    config: CheckSuiteConfig
    trials_run: int = 0
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def status(self) -> str:
        return "fail" if self.failures else "pass"

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, check: str, passed: bool, offset: int, counterexample=None) -> None:
        good, total = self.counts.get(check, (0, 0))
        self.counts[check] = (good + bool(passed), total + 1)
        if not passed:
            self.failures.append(Failure(offset, check, counterexample or {}))

    def body(self) -> dict:
        c = self.config
        return {
            "schema": SCHEMA,
            "suite": c.suite,
            "status": self.status,
            "config": {
                "trials": c.trials,
                "seed": c.seed,
                "offset": c.offset,
                "n_max": c.n_max,
                "degree_max": c.degree_max,
                "theta_budget": c.theta_budget,
            },
            "trials_run": self.trials_run,
            "checks": {k: {"passed": v[0], "total": v[1]} for k, v in sorted(self.counts.items())},
            "failures": [f.to_dict() for f in sorted(self.failures, key=lambda f: (f.offset, f.check))],
        }

    def to_structured(self) -> str:
        data = self.body()
        data["elapsed_seconds"] = round(self.elapsed, 3)
        return json.dumps(data, indent=2, sort_keys=True)

    def to_text(self) -> str:
        c = self.config
        lines = [
            f"suite {c.suite}: {self.status.upper()}",
            f"trials {self.trials_run} (seed {c.seed}, offset {c.offset}, n<={c.n_max}, "
            f"degree<={c.degree_max}, theta<={c.theta_budget})",
        ]
        for name, (good, total) in sorted(self.counts.items()):
            lines.append(f"  {name:<28} {good}/{total}")
        for f in sorted(self.failures, key=lambda f: (f.offset, f.check)):
            lines.append(f"  FAIL {f.check} at offset {f.offset}")
            for k, v in sorted(f.counterexample.items()):
                lines.append(f"    {k}: {v}")
        lines.append(f"elapsed {self.elapsed:.2f}s")
        return "\n".join(lines)


def replay_command(cfg: CheckSuiteConfig, offset: int) -> str:
    return (
        f"oddsymp check {cfg.suite} --seed {cfg.seed} --offset {offset} --trials 1 "
        f"--n {cfg.n_max} --degree-max {cfg.degree_max} --theta-budget {cfg.theta_budget}"
    )


def _chart(rng, cfg: CheckSuiteConfig, n_max: int | None = None, theta: int | None = None) -> Chart:
    n = rng.randint(1, n_max or cfg.n_max)
    return Chart(n, cfg.theta_budget if theta is None else theta)


def _homog(rng, gens, deg):
    return random_poly(rng, gens, FUNCTION_KINDS, 3, deg, parity=rng.randint(0, 1))


# suites; each trial function records its checks on the report


def _berezinian(rng, cfg, k, rep):
    n = rng.randint(1, cfg.n_max)
    budget = rng.randint(0, cfg.theta_budget)
    seed = rng.getrandbits(32)
    J = sample_symplectic(n, budget, seed)
    ce = {"n": n, "theta_budget": budget, "sample_seed": seed, "matrix": format_matrix(J)}
    cert = is_symplectic(J)
    rep.record("constraints", cert.ok, k, {**ce, "failed": ",".join(cert.failures)})
    rep.record("ber_equals_det00_squared", cert.ok and check_berezinian_identity(J), k, ce)
    if k % 4 == 0:
        K = sample_symplectic(n, budget, seed + 1)
        rep.record("ber_multiplicative", berezinian(J @ K) == berezinian(J) * berezinian(K), k, ce)


def _nilpotency(rng, cfg, k, rep):
    ch = _chart(rng, cfg)
    gens = ch.gens
    deg = cfg.degree_max
    s = random_poly(rng, gens, FUNCTION_KINDS, 5, deg)
    rep.record("delta_squared", bv.delta_half_density(bv.delta_half_density(GeometricObject.density(ch, s))).body.is_zero, k, {"n": ch.n, "s": str(s)})
    m = random_poly(rng, gens, FUNCTION_KINDS, 5, deg)
    rep.record("divergence_squared", bv_laplacian(bv_laplacian(m)).is_zero, k, {"n": ch.n, "s": str(m)})
    w = random_poly(rng, gens, FORM_KINDS, 5, deg)
    rep.record("d_squared", exterior_d(exterior_d(w)).is_zero, k, {"n": ch.n, "form": str(w)})
    v = random_poly(rng, gens, FORM_KINDS, 5, deg)
    rep.record("D_squared", bv.D_total(bv.D_total(v)).is_zero, k, {"n": ch.n, "form": str(v)})
    rep.record("omega_squared", (omega(gens) * (omega(gens) * v)).is_zero, k, {"n": ch.n, "form": str(v)})


def _homotopy(rng, cfg, k, rep):
    ch = _chart(rng, cfg)
    gens = ch.gens
    a = random_admissible_form(rng, gens, 4, cfg.degree_max)
    lhs = bv.homotopy_H(bv.omega_mult(a)) + bv.omega_mult(bv.homotopy_H(a))
    rep.record("H_omega_plus_omega_H", lhs == a, k, {"n": ch.n, "form": str(a)})
    bad = random_poly(rng, gens, FUNCTION_KINDS, 2, 2) * spectral.top_form(gens)
    try:
        bv.homotopy_H(bad)
        rejected = False
    except bv.InadmissibleForm:
        rejected = True
    rep.record("rejects_top_degree_without_dxi", rejected, k, {"n": ch.n, "form": str(bad)})


def _spectral(rng, cfg, k, rep):
    ch = _chart(rng, cfg)
    s = random_poly(rng, ch.gens, FUNCTION_KINDS, 4, cfg.degree_max)
    c = spectral.E1Class(ch, s)
    ce = {"n": ch.n, "class": str(s)}
    rep.record("d1_vanishes", spectral.d1(c).cls.is_zero, k, ce)
    rep.record("d2_equals_minus_delta", spectral.d2(c).cls.representative == -bv_laplacian(s), k, ce)
    if ch.n <= 2:
        beta = spectral.d2(c).beta
        res = spectral.relation_membership(2, c.form(), beta)
        rep.record("relation_2_contains_d2", res.status == "feasible", k, ce)
    if k == cfg.offset:
        for n in range(1, min(2, cfg.n_max) + 1):
            r = spectral.delta_cohomology(spectral.GradedSlice.weight_bounded(Chart(n), cfg.degree_max))
            rep.record(
                "delta_cohomology_dim_1",
                r.dimension == 1,
                k,
                {"n": n, "degree_max": cfg.degree_max, "dimension": r.dimension},
            )


def _delta_invariance(rng, cfg, k, rep):
    ch = _chart(rng, cfg)
    F = random_transformation(rng, ch)
    s = random_poly(rng, ch.gens, FUNCTION_KINDS, 4, cfg.degree_max)
    sig = GeometricObject.density(ch, s)
    lhs = bv.delta_half_density(pullback(F, sig))
    rhs = pullback(F, bv.delta_half_density(sig))
    ce = {"n": ch.n, "density": str(s), "transformation": dump_transformation(F)}
    rep.record("delta_commutes_with_pullback", lhs == rhs, k, ce)
    rep.record("preserves_omega", F.preserves_omega(), k, ce)


def _vector_field(rng, gens, deg):
    X = SuperPolynomial.zero(gens)
    for a in range(1, gens.n + 1):
        coef = random_poly(rng, gens, (Kind.X,), 2, deg, nonzero=False)
        X = X + coef * SuperPolynomial.gen(gens, gens.xi(a))
    return X if X else SuperPolynomial.gen(gens, gens.xi(1))


def _lie_algebra(rng, cfg, k, rep):
    ch = _chart(rng, cfg)
    gens = ch.gens
    deg = min(cfg.degree_max, 3)
    H, G = _homog(rng, gens, deg), _homog(rng, gens, deg)
    ph, pg = H.parity(), G.parity()
    B = bv.schouten_bracket(H, G)
    sign = -1 if (ph + 1) * (pg + 1) % 2 else 1
    s = random_poly(rng, gens, FUNCTION_KINDS, 3, deg)
    w = random_poly(rng, gens, BASE_FORM_KINDS, 3, deg)
    ce = {"n": ch.n, "H": str(H), "G": str(G), "density": str(s), "form": str(w)}
    LD = bv.lie_derivative_density
    LF = bv.lie_derivative_form
    rep.record("bracket_on_densities", LD(B, s) == LD(H, LD(G, s)) - sign * LD(G, LD(H, s)), k, ce)
    rep.record("bracket_on_forms", LF(B, w) == LF(H, LF(G, w)) - sign * LF(G, LF(H, w)), k, ce)
    lsgn = -1 if ph % 2 == 0 else 1  # (-1)^(|L_H|) with |L_H| = |H| + 1
    rep.record("delta_commutes_with_L", bv_laplacian(LD(H, s)) == lsgn * LD(H, bv_laplacian(s)), k, ce)
    rep.record("d_commutes_with_L", exterior_d(LF(H, w)) == lsgn * LF(H, exterior_d(w)), k, ce)
    X = _vector_field(rng, gens, 2)
    cw = random_poly(rng, gens, BASE_FORM_KINDS, 3, deg)
    ce2 = {"n": ch.n, "X": str(X), "form": str(cw)}
    rep.record("cartan_lie_derivative", LF(X, cw) == bv.cartan_lie_derivative(X, cw), k, ce2)
    classical = SuperPolynomial.zero(gens)
    for a in range(1, gens.n + 1):
        classical = classical + X.derive(gens.xi(a)) * cw.derive(gens.dx(a))
    minus_i = -SuperPolynomial.imag(gens)
    rep.record("cartan_interior_product", bv.interior_product(X, cw) == minus_i * classical, k, ce2)
    s2 = random_poly(rng, gens, (Kind.X,), 3, deg)
    classical_dens = SuperPolynomial.zero(gens)
    for a in range(1, gens.n + 1):
        classical_dens = classical_dens + (X.derive(gens.xi(a)) * s2).derive(gens.x(a))
    rep.record("classical_density_lie_derivative", LD(X, s2) == classical_dens, k, {**ce2, "density": str(s2)})


def _fourier(rng, cfg, k, rep):
    ch = _chart(rng, cfg)
    gens = ch.gens
    deg = cfg.degree_max
    s = random_poly(rng, gens, FUNCTION_KINDS, 4, deg)
    ce = {"n": ch.n, "density": str(s)}
    rep.record("inverse_after_fourier", bv.inv_fourier(bv.fourier(s)) == s, k, ce)
    if k - cfg.offset < max(50, cfg.trials // 2):
        I = SuperPolynomial.imag(gens)
        rep.record("fourier_delta_is_i_d_fourier", bv.fourier(bv_laplacian(s)) == I * exterior_d(bv.fourier(s)), k, ce)
        H = random_poly(rng, gens, FUNCTION_KINDS, 3, 2)
        rep.record(
            "fourier_H_is_iH_fourier",
            bv.fourier(H * s) == bv.interior_product(H, bv.fourier(s)),
            k,
            {**ce, "H": str(H)},
        )
    if k - cfg.offset < max(20, cfg.trials // 5):
        F = random_triangular_diffeo(rng, ch)
        w = GeometricObject.form(ch, random_poly(rng, gens, BASE_FORM_KINDS, 3, deg))
        ce3 = {"n": ch.n, "form": str(w.body), "transformation": dump_transformation(F)}
        rep.record("pullback_paths_agree_for_diffeos", bv.pullback_form_via_fourier(F, w).body == pullback(F, w).body, k, ce3)
        G = random_transformation(rng, ch)
        dw = w.with_body(exterior_d(w.body))
        ce4 = {"n": ch.n, "form": str(w.body), "transformation": dump_transformation(G)}
        rep.record(
            "pullback_commutes_with_d",
            bv.pullback_form_via_fourier(G, dw).body == exterior_d(bv.pullback_form_via_fourier(G, w).body),
            k,
            ce4,
        )


def convention_anchors() -> list[tuple[str, bool]]:
    """Each frozen convention evaluated on its anchor identity."""
    out = []
    c1 = Chart(1, 2)
    g1 = c1.gens
    p = c1.poly
    out.append(("bracket {x1, xi1} = 1", bv.odd_bracket(p("x1"), p("xi1")) == p("1")))
    c2 = Chart(2)
    q = c2.poly
    xi = [c2.gens.xi(1), c2.gens.xi(2)]
    out.append(("berezin int D(xi1,xi2) xi1*xi2 = 1", q("xi1*xi2").berezin(xi) == q("1")))
    out.append(("berezin int D(xi1,xi2) xi2*xi1 = -1", q("xi2*xi1").berezin(xi) == q("-1")))
    out.append(("d Theta = omega", exterior_d(darboux_theta(g1)) == omega(g1)))
    out.append(("d(x1*xi1) = dx1*xi1 + x1*dxi1", exterior_d(p("x1*xi1")) == p("dx1*xi1 + x1*dxi1")))
    out.append(("Delta_rho = Delta for the coordinate volume", bv.laplacian_with_volume(p("x1*xi1"), GeometricObject.volume(c1)) == p("1")))
    out.append(("H(dx1*dxi1) = 1", bv.homotopy_H(p("dx1*dxi1")) == p("1")))
    out.append(("fourier(1) = i*dx1", bv.fourier(p("1")) == p("i*dx1")))
    out.append(("fourier(xi1) = 1", bv.fourier(p("xi1")) == p("1")))
    for n in range(1, 5):
        ch = Chart(n)
        out.append((f"inv_fourier(fourier(1)) = 1 for n={n}", bv.inv_fourier(bv.fourier(ch.poly("1"))) == ch.poly("1")))
    out.append(("fourier(Delta(x1*xi1)) = i d fourier(x1*xi1)", bv.fourier(bv_laplacian(p("x1*xi1"))) == p("i") * exterior_d(bv.fourier(p("x1*xi1")))))
    out.append(("i_{xi1} dx1 = -i", bv.interior_product(p("xi1"), p("dx1")) == p("-i")))
    out.append(("L_{xi1} x1 = 1 on forms", bv.lie_derivative_form(p("xi1"), p("x1")) == p("1")))
    out.append(("L_{xi1} x1 = 1 on densities", bv.lie_derivative_density(p("xi1"), p("x1")) == p("1")))
    H, G = p("x1*xi1"), p("x1*x1")
    out.append((
        "L_[[x1*xi1, x1^2]] = [L_H, L_G] on x1*xi1",
        bv.lie_derivative_density(bv.schouten_bracket(H, G), p("xi1"))
        == bv.lie_derivative_density(H, bv.lie_derivative_density(G, p("xi1")))
        + bv.lie_derivative_density(G, bv.lie_derivative_density(H, p("xi1"))),
    ))
    out.append(("D = exp(-Theta) d exp(Theta) on 1", bv.theta_conjugation_check(p("1"))))
    out.append(("e1 class of dx1 is 1", spectral.e1_project(c1, p("dx1")).cls.representative == p("1")))
    return out


def _conventions(rng, cfg, k, rep):
    if k == cfg.offset:
        for name, ok in convention_anchors():
            rep.record("anchor: " + name, ok, k, {"anchor": name})
    # mutual consistency of the frozen choices on random data
    ch = _chart(rng, cfg)
    gens = ch.gens
    H = _homog(rng, gens, 2)
    s = random_poly(rng, gens, FUNCTION_KINDS, 3, 2)
    ce = {"n": ch.n, "H": str(H), "density": str(s)}
    rep.record(
        "fourier intertwines the two Lie derivatives",
        bv.fourier(bv.lie_derivative_density(H, s)) == bv.lie_derivative_form(H, bv.fourier(s)),
        k,
        ce,
    )
    f, g = _homog(rng, gens, 2), _homog(rng, gens, 2)
    rho = GeometricObject.volume(ch, 1 + random_poly(rng, gens, FUNCTION_KINDS, 2, 2, parity=0, nonzero=False).filter(lambda key: key[1]))
    L = lambda v: bv.laplacian_with_volume(v, rho)  # noqa: E731
    sg = -1 if f.parity() else 1
    defect = L(f * g) - L(f) * g - sg * f * L(g)
    rep.record(
        "Delta_rho Leibniz defect is the bracket",
        defect == sg * bv.odd_bracket(f, g),
        k,
        {"n": ch.n, "f": str(f), "g": str(g), "rho": str(rho.body)},
    )
    a, b, c = (_homog(rng, gens, 2) for _ in range(3))
    pa, pb = a.parity() + 1, b.parity() + 1
    br = bv.odd_bracket
    jac = br(a, br(b, c)) - br(br(a, b), c) - (-1) ** (pa * pb) * br(b, br(a, c))
    rep.record("bracket Jacobi identity", jac.is_zero, k, {"n": ch.n, "a": str(a), "b": str(b), "c": str(c)})
    w = random_poly(rng, gens, FORM_KINDS, 3, 2)
    rep.record("D = exp(-Theta) d exp(Theta)", bv.theta_conjugation_check(w), k, {"n": ch.n, "form": str(w)})


def non_invariance_witness() -> tuple:
    """A diffeomorphism after a fiber shift that rescales the coordinate volume."""
    ch = Chart(1, 1)
    p = ch.poly
    F = compose(make_diffeo(ch, [p("2*x1")], [p("1/2*x1")]), make_fiber_shift(ch, p("th1*x1*x1")))
    vol = pullback(F, GeometricObject.volume(ch))
    return ch, F, vol


def _non_invariance(rng, cfg, k, rep):
    ch, F, vol = non_invariance_witness()
    if k == cfg.offset:
        rep.record("volume_not_preserved", vol.body != ch.poly("1"), k, {"transformation": dump_transformation(F), "pulled_back_volume": str(vol.body)})
    s = random_poly(rng, ch.gens, FUNCTION_KINDS, 4, cfg.degree_max)
    sig = GeometricObject.density(ch, s)
    ok = bv.delta_half_density(pullback(F, sig)) == pullback(F, bv.delta_half_density(sig))
    rep.record("half_density_still_intertwines_delta", ok, k, {"density": str(s), "transformation": dump_transformation(F)})
    # random composites whose volume changes still intertwine Delta
    ch2 = _chart(rng, cfg, theta=max(1, cfg.theta_budget))
    G = random_transformation(rng, ch2)
    s2 = random_poly(rng, ch2.gens, FUNCTION_KINDS, 3, cfg.degree_max)
    sig2 = GeometricObject.density(ch2, s2)
    ok2 = bv.delta_half_density(pullback(G, sig2)) == pullback(G, bv.delta_half_density(sig2))
    rep.record("random_composite_intertwines_delta", ok2, k, {"density": str(s2), "transformation": dump_transformation(G)})


_RUNNERS = {
    "berezinian": _berezinian,
    "nilpotency": _nilpotency,
    "homotopy": _homotopy,
    "spectral": _spectral,
    "delta-invariance": _delta_invariance,
    "lie-algebra": _lie_algebra,
    "fourier": _fourier,
    "conventions": _conventions,
    "non-invariance": _non_invariance,
}


def run_suite(cfg: CheckSuiteConfig) -> CheckReport:
    rep = CheckReport(cfg)
    runner = _RUNNERS[cfg.suite]
    start = time.perf_counter()
    for k in range(cfg.offset, cfg.offset + cfg.trials):
        before = len(rep.failures)
        try:
            runner(trial_rng(cfg.seed, k), cfg, k, rep)
        except Exception as exc:  # a crash inside a trial is a failure, not an abort
            rep.record("no_exception", False, k, {"error": f"{type(exc).__name__}: {exc}"})
        for f in rep.failures[before:]:
            f.counterexample.setdefault("replay", replay_command(cfg, k))
        rep.trials_run += 1
    rep.elapsed = time.perf_counter() - start
    return rep
