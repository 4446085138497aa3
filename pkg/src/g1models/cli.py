"""Command-line interface: ``g1models <command> [options]``.

Exit codes: 0 success, 1 domain error (the error class is printed), 2 usage error.
Models are read from ``--model PATH`` in the g1m format; ``-`` or no flag reads stdin.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .exactmath import fmt_rational
from .resolution import ResolutionModel, from_g1m, to_g1m, validate

__all__ = ["CommandResult", "run", "main"]


@dataclass
class CommandResult:
    code: int
    text: str
    doc: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


def _read_model(path: str | None, stdin) -> ResolutionModel:
    if path in (None, "-"):
        text = stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return from_g1m(text)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None


def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma separated rationals, got {text!r}") from None


def _doc_text(doc: dict) -> str:
    out = []
    for k, v in doc.items():
        if isinstance(v, list) and v and all(isinstance(x, str) for x in v):
            out.append(f"{k}:")
            out.extend(f"  {x}" for x in v)
        else:
            out.append(f"{k}: {v}")
    return "\n".join(out)


# commands

def cmd_validate(args, stdin):
    model = _read_model(args.model, stdin)
    rep = validate(model)
    doc = {"n": model.n, "m": model.m, "kind": model.kind, "ok": rep.ok, "report": rep.lines()}
    return CommandResult(0 if rep.ok else 1, "\n".join(rep.lines()) + ("" if rep.ok else "\nerror: ModelError: validation failed"), doc)


def cmd_invariants(args, stdin):
    import warnings
    from .omega import jacobian_equation, omega_element
    model = _read_model(args.model, stdin)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w = jacobian_equation(omega_element(model))
    doc = {"c4": fmt_rational(w.c4), "c6": fmt_rational(w.c6), "delta": fmt_rational(w.delta),
           "jacobian": w.equation()}
    if w.warning:
        doc["warning"] = w.warning
    if w.degenerate:
        doc["warning"] = "singular: c4^3 = c6^2"
    return CommandResult(0, _doc_text(doc), doc)


def cmd_discform(args, stdin):
    from .discform import disc_eval, disc_poly
    model = _read_model(args.model, stdin)
    if args.at is None and not args.poly:
        raise UsageError("discform needs --at u1,...,un or --poly")
    if args.at is not None:
        u = _rationals(args.at)
        if len(u) != model.n:
            raise UsageError(f"--at needs {model.n} entries")
        doc = {"u": ",".join(fmt_rational(x) for x in u), "D": fmt_rational(disc_eval(model, u))}
    else:
        D = disc_poly(model, threads=args.threads)
        doc = {"n": model.n, "degree": 2 * model.n, "terms": len(D.poly.terms), "D": str(D.poly)}
    return CommandResult(0, _doc_text(doc), doc)


def cmd_algebra(args, stdin):
    from .discform import disc_normalizer, slice_table
    from .points_algebra import format_combination, multiplication_table, shifted_order, trace_disc
    model = _read_model(args.model, stdin)
    if model.m == model.n:
        if args.at is None:
            raise UsageError("a curve model needs --at u1,...,un to choose the hyperplane section")
        tab = slice_table(model, _ints(args.at))
    else:
        tab = multiplication_table(model)
    order = shifted_order(tab)
    raw = trace_disc(tab)
    lines = []
    for i in range(tab.n - 1):
        for j in range(i, tab.n - 1):
            lines.append(f"a{i + 1}*a{j + 1} = " + format_combination(tab.product_basis(i, j), "a"))
    doc = {"rank": tab.n, "table": lines, "trace_det": fmt_rational(raw),
           "disc": fmt_rational(raw / disc_normalizer(tab.n)), "order": order.lines(),
           "associative": tab.is_associative(), "commutative": tab.is_commutative()}
    return CommandResult(0, _doc_text(doc), doc)


def cmd_unproject(args, stdin):
    from .unprojection import unproject_curve
    model = _read_model(args.model, stdin)
    out = unproject_curve(model, _rationals(args.point))
    text = to_g1m(out).rstrip("\n")
    return CommandResult(0, text, {"g1m": text})


def cmd_build_curve(args, stdin):
    from .unprojection import elliptic_normal_curve
    a = _rationals(args.weierstrass)
    if len(a) != 5:
        raise UsageError("--weierstrass needs a1,a2,a3,a4,a6")
    out = elliptic_normal_curve(*a, args.degree)
    text = to_g1m(out).rstrip("\n")
    return CommandResult(0, text, {"g1m": text})


def _parse_tau(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad --tau {text!r}; use e.g. 0+2i or 0.5+2i") from None


def cmd_qcheck(args, stdin):
    import mpmath as mp
    from .heisenberg import verify_analytic
    rep = verify_analytic(args.n, _parse_tau(args.tau), prec=args.prec, tol=args.tol)
    doc = {"n": args.n, "tau": args.tau, "prec": args.prec,
           "c4": mp.nstr(rep.c4, 20), "c6": mp.nstr(rep.c6, 20),
           "rel_err_c4": f"{rep.rel_err4:.3e}", "rel_err_c6": f"{rep.rel_err6:.3e}",
           "t_equation_err": f"{rep.t_equation_err:.3e}", "s_equation_err": f"{rep.s_equation_err:.3e}",
           "ok": rep.ok}
    text = "\n".join(rep.lines())
    if not rep.ok:
        text += "\nerror: PrecisionNotMet"
    return CommandResult(0 if rep.ok else 1, text, doc)


def cmd_capitulate(args, stdin):
    from .capitulation import bound_report
    model = _read_model(args.model, stdin)
    radii = list(range(1, args.radius + 1))
    b = bound_report(model, radii, threads=args.threads)
    doc = b.report.as_dict()
    doc["ratio"] = f"{b.report.ratio:.6g}"
    doc["H_E"] = f"{b.report.H_E:.6g}"
    doc["ratios_by_radius"] = [f"R={R} D={v} ratio={r:.6g} u={list(u)}" for R, u, v, r in b.table]
    return CommandResult(0, _doc_text(doc), doc)


COMMANDS = {
    "validate": cmd_validate, "invariants": cmd_invariants, "discform": cmd_discform,
    "algebra": cmd_algebra, "unproject": cmd_unproject, "build-curve": cmd_build_curve,
    "qcheck": cmd_qcheck, "capitulate": cmd_capitulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker processes for parallel stages")
    common.add_argument("--json", action="store_true", help="print the structured document as JSON")
    p = argparse.ArgumentParser(prog="g1models", description="Resolution models of genus one curves.")
    p.add_argument("--version", action="version", version=f"g1models {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def model_cmd(name, help_):
        s = sub.add_parser(name, help=help_, parents=[common])
        s.add_argument("--model", help="g1m file ('-' or omitted: stdin)")
        return s

    model_cmd("validate", "check chain condition, grading, Betti numbers and self-duality")
    model_cmd("invariants", "c4, c6 and the Jacobian of a curve model")
    s = model_cmd("discform", "evaluate or interpolate the discriminant form")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--at", help="u1,...,un")
    g.add_argument("--poly", action="store_true", help="interpolate the full degree-2n form")
    s = model_cmd("algebra", "multiplication table of a points model (or of a curve slice with --at)")
    s.add_argument("--at", help="hyperplane u1,...,un when the model is a curve")
    s = model_cmd("unproject", "degree n+1 model from a rational point")
    s.add_argument("--point", required=True, help="p1,...,pn")
    s = sub.add_parser("build-curve", help="elliptic normal curve of degree n", parents=[common])
    s.add_argument("--weierstrass", required=True, help="a1,a2,a3,a4,a6")
    s.add_argument("--degree", type=int, required=True)
    s = sub.add_parser("qcheck", help="numeric check of c_k(Omega_tau) = (2 pi)^k E_k(tau)", parents=[common])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--tau", required=True, help="e.g. 0+2i")
    s.add_argument("--prec", type=int, default=128, help="binary precision")
    s.add_argument("--tol", type=float, default=1e-9)
    s = model_cmd("capitulate", "search for small discriminants D(u)")
    s.add_argument("--radius", type=int, default=2)
    return p


def run(argv, stdin=None) -> CommandResult:
    """Parse and execute; never exits the interpreter."""
    stdin = stdin if stdin is not None else sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return CommandResult(int(e.code or 0), "")
    try:
        res = COMMANDS[args.command](args, stdin)
    except UsageError as e:
        return CommandResult(2, f"usage error: {e}")
    except (ValueError, ArithmeticError, OSError, KeyError, IndexError) as e:
        return CommandResult(1, f"error: {type(e).__name__}: {e}")
    if args.json:
        res.text = json.dumps(res.doc, indent=2)
    return res


def main(argv=None) -> int:
    res = run(sys.argv[1:] if argv is None else argv)
    if res.text:
        stream = sys.stdout if res.code == 0 else sys.stderr
        if res.code == 1 and not res.text.startswith("error"):
            # validation and precision reports go to stdout, the error line to stderr
            body, _, err = res.text.rpartition("\n")
            print(body, file=sys.stdout)
            print(err, file=sys.stderr)
        else:
            print(res.text, file=stream)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
