"""Command-line front end.

Every verb reads expressions in the core grammar (positional arguments, or
stdin when the argument is ``-`` or missing) and prints canonical forms.
Errors go to stderr as one JSON object and map to distinct exit codes.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from oddsymp import bv, spectral
from oddsymp.expr import ParseError
from oddsymp.geometry import (
    Chart,
    FlowNotNilpotent,
    GeometricObject,
    NotCanonical,
    load_transformation,
    pullback,
)
from oddsymp.grassmann import GeneratorMismatch, NotInvertible, ParityError
from oddsymp.superlinalg import berezinian, format_matrix, is_symplectic, parse_matrix, sample_symplectic
from oddsymp.suites import SUITES, CheckSuiteConfig, UnknownSuite, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# (exception type, exit code, error name); first match wins
ERRORS = [
    (ParseError, 3, "parse-error"),
    (GeneratorMismatch, 3, "unknown-symbol"),
    (ParityError, 4, "parity-error"),
    (bv.WrongKind, 5, "wrong-kind"),
    (NotInvertible, 6, "not-invertible"),
    (ZeroDivisionError, 6, "not-invertible"),
    (bv.InadmissibleForm, 7, "inadmissible-form"),
    (spectral.NotClosed, 8, "not-closed"),
    (spectral.SliceNotClosed, 8, "slice-not-closed"),
    (NotCanonical, 9, "not-canonical"),
    (FlowNotNilpotent, 9, "flow-not-nilpotent"),
    (UnknownSuite, 2, "unknown-suite"),
    (OSError, 10, "io-error"),
    (json.JSONDecodeError, 10, "bad-file"),
    (KeyError, 10, "bad-file"),
    (ValueError, 11, "precondition"),
]

_INDEX = re.compile(r"\b(?:x|xi|dx|dxi)(\d+)\b")
_THETA = re.compile(r"\bth(\d+)\b")


def _read(arg: str | None) -> str:
    if arg is None or arg == "-":
        return sys.stdin.read().strip()
    return arg


def _chart(args, *texts: str) -> Chart:
    """Chart big enough for the flags and for every index used in the inputs."""
    n = max([int(m) for t in texts for m in _INDEX.findall(t)] or [1])
    m = max([int(k) for t in texts for k in _THETA.findall(t)] or [0])
    if args.n is not None:
        n = args.n if args.n >= n else n
    if args.theta_budget is not None:
        m = max(m, args.theta_budget)
    return Chart(n, m)


def _emit(args, verb: str, result, extra: dict | None = None) -> None:
    text = str(result)
    if args.format == "structured":
        out = {"schema": "oddsymp.result/1", "verb": verb, "result": text}
        out.update(extra or {})
        print(json.dumps(out, sort_keys=True))
    else:
        print(text)


def _unary(op):
    def run(args):
        text = _read(args.expr)
        ch = _chart(args, text)
        return op(ch, ch.poly(text))

    return run


def _binary(op):
    def run(args):
        a, b = _read(args.left), _read(args.right)
        ch = _chart(args, a, b)
        return op(ch, ch.poly(a), ch.poly(b))

    return run


def _dens(ch, p):
    return GeometricObject.density(ch, p)


def _form(ch, p):
    return GeometricObject.form(ch, p)


VERBS_UNARY = {
    "eval": (lambda ch, p: p, "canonical form of an expression"),
    "delta": (lambda ch, p: bv.delta_half_density(_dens(ch, p)).body, "odd Laplacian of a half-density body"),
    "div": (lambda ch, p: bv.divergence(_dens(ch, p)).body, "divergence of a multivector density body"),
    "d": (lambda ch, p: bv.de_rham(_form(ch, p)).body, "de Rham differential of a form"),
    "omega": (lambda ch, p: bv.omega_mult(_form(ch, p)).body, "multiply a form by omega"),
    "D": (lambda ch, p: bv.D_total(_form(ch, p)).body, "D = d + omega"),
    "homotopy": (lambda ch, p: bv.homotopy_H(_form(ch, p)).body, "Koszul homotopy H"),
    "fourier": (lambda ch, p: bv.fourier(_dens(ch, p)).body, "density to base form"),
    "invfourier": (lambda ch, p: bv.inv_fourier(_form(ch, p)).body, "base form to density"),
    "d2": (lambda ch, p: spectral.d2(spectral.E1Class(ch, p)).cls, "second differential of an E1 class"),
    "d1": (lambda ch, p: spectral.d1(spectral.E1Class(ch, p)).cls, "first differential of an E1 class"),
    "e1": (lambda ch, p: spectral.e1_project(ch, _form(ch, p)).cls, "E1 class of an omega-closed form"),
}

VERBS_BINARY = {
    "bracket": (lambda ch, f, g: bv.odd_bracket(f, g), "odd (Schouten) bracket {F, G}"),
    "iprod": (lambda ch, h, w: bv.interior_product(h, w), "interior product i_H of a form"),
    "lie-form": (lambda ch, h, w: bv.lie_derivative_form(h, w), "Lie derivative of a form"),
    "lie-dens": (lambda ch, h, s: bv.lie_derivative_density(h, s), "Lie derivative of a density"),
    "laplacian-rho": (
        lambda ch, f, rho: bv.laplacian_with_volume(f, GeometricObject.volume(ch, rho)),
        "Delta_rho f for a volume body rho",
    ),
    "master": (
        lambda ch, rho, s: str(bv.master_predicate(GeometricObject.volume(ch, rho), s)).lower(),
        "whether Delta_rho exp(S/2) = 0",
    ),
}


def _cmd_ber(args):
    J = parse_matrix(open(args.file).read() if args.file != "-" else sys.stdin.read())
    return berezinian(J)


def _cmd_symplectic(args):
    J = parse_matrix(open(args.file).read() if args.file != "-" else sys.stdin.read())
    cert = is_symplectic(J)
    if cert.ok:
        return "true"
    return "false (" + ", ".join(cert.failures) + ")"


def _cmd_sample(args):
    return format_matrix(sample_symplectic(args.n or 1, args.theta_budget or 0, args.seed)).rstrip("\n")


def _cmd_pullback(args):
    with open(args.transformation) as fh:
        F = load_transformation(fh.read())
    text = _read(args.expr)
    ch = F.chart
    body = ch.poly(text)
    kinds = {
        "field": GeometricObject.field,
        "density": GeometricObject.density,
        "form": GeometricObject.form,
        "volume": GeometricObject.volume,
    }
    obj = kinds[args.kind](ch, body)
    if args.kind == "form" and args.via_fourier:
        return bv.pullback_form_via_fourier(F, obj).body
    return pullback(F, obj).body


def _cmd_cohomology(args):
    n = args.n or 1
    sl = spectral.GradedSlice.weight_bounded(Chart(n), args.degree_max)
    res = spectral.delta_cohomology(sl)
    reps = ", ".join(str(r) for r in res.representatives) or "none"
    return f"dimension {res.dimension}: {reps}"


def _cmd_relation(args):
    a, b = _read(args.alpha), _read(args.beta)
    ch = _chart(args, a, b)
    res = spectral.relation_membership(args.r, ch.poly(a), ch.poly(b), args.bound)
    if res.status == "feasible":
        chain = "; ".join(f"alpha{k + 1} = {p}" for k, p in enumerate(res.chain))
        return f"feasible{': ' + chain if chain else ''}"
    return f"{res.status}: {res.reason}"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="number of coordinate pairs")
    common.add_argument("--theta-budget", type=int, default=None, help="number of odd parameters th<k>")
    common.add_argument("--degree-max", type=int, default=3)
    common.add_argument("--format", choices=("text", "structured"), default="text")

    parser = argparse.ArgumentParser(prog="oddsymp", description="Exact odd symplectic calculus.")
    sub = parser.add_subparsers(dest="verb", required=True)
    for name, (_, doc) in VERBS_UNARY.items():
        p = sub.add_parser(name, parents=[common], help=doc)
        p.add_argument("expr", nargs="?")
    for name, (_, doc) in VERBS_BINARY.items():
        p = sub.add_parser(name, parents=[common], help=doc)
        p.add_argument("left")
        p.add_argument("right")
    for name in ("ber", "symplectic?", "symplectic"):
        p = sub.add_parser(name, parents=[common], help="Berezinian or symplectic test of a matrix file")
        p.add_argument("file")
    p = sub.add_parser("sample", parents=[common], help="sample a symplectic supermatrix")
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("pullback", parents=[common], help="pull an object back along a transformation file")
    p.add_argument("transformation")
    p.add_argument("expr", nargs="?")
    p.add_argument("--kind", choices=("field", "density", "form", "volume"), default="density")
    p.add_argument("--via-fourier", action="store_true", help="forms: conjugate the density action by Fourier")
    sub.add_parser("cohomology", parents=[common], help="Delta cohomology on a weight-bounded slice")
    p = sub.add_parser("relation", parents=[common], help="membership in the r-th linear relation")
    p.add_argument("r", type=int)
    p.add_argument("alpha")
    p.add_argument("beta")
    p.add_argument("--bound", type=int, default=None, help="even-degree cap on the witness chain")
    p = sub.add_parser("check", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--offset", type=int, default=0)
    return parser


def _dispatch(args):
    v = args.verb
    if v in VERBS_UNARY:
        return _unary(VERBS_UNARY[v][0])(args)
    if v in VERBS_BINARY:
        return _binary(VERBS_BINARY[v][0])(args)
    table = {
        "ber": _cmd_ber,
        "symplectic?": _cmd_symplectic,
        "symplectic": _cmd_symplectic,
        "sample": _cmd_sample,
        "pullback": _cmd_pullback,
        "cohomology": _cmd_cohomology,
        "relation": _cmd_relation,
    }
    return table[v](args)


def _fail(args, exc: BaseException) -> int:
    for etype, code, name in ERRORS:
        if isinstance(exc, etype):
            break
    else:
        raise exc
    err = {"error": name, "code": code, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["position"] = exc.pos
    print(json.dumps(err, sort_keys=True), file=sys.stderr)
    return code


def _protect_negative(argv):
    """Expressions like ``-dx1`` would read as options; a leading space keeps them positional."""
    out = []
    for a in argv:
        if a.startswith("-") and len(a) > 1 and not a.startswith("--") and a != "-h":
            a = " " + a
        out.append(a)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_protect_negative(sys.argv[1:] if argv is None else list(argv)))
    try:
        if args.verb == "check":
            cfg = CheckSuiteConfig(
                args.suite,
                trials=args.trials,
                seed=args.seed,
                n_max=args.n or 2,
                degree_max=args.degree_max,
                theta_budget=2 if args.theta_budget is None else args.theta_budget,
                offset=args.offset,
            )
            report = run_suite(cfg)
            print(report.to_structured() if args.format == "structured" else report.to_text())
            return EXIT_OK if report.ok else EXIT_CHECK_FAILED
        _emit(args, args.verb, _dispatch(args))
        return EXIT_OK
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes
        return _fail(args, exc)


if __name__ == "__main__":
    sys.exit(main())
