"""Command line: ``conslaw multipliers|fluxes|verify PROBLEM [options]``.

Exit codes: 0 success, 2 parse or problem error, 3 empty result,
4 method inapplicable, 5 verification failure, 1 any other failure.
"""
from __future__ import annotations

import argparse
import json
import sys as _sys
from dataclasses import replace
from typing import Sequence

from . import __version__
from .errors import (
    ConslawError,
    EmptyAnsatz,
    ExpressionError,
    MethodInapplicable,
    ParseError,
    ProblemError,
    VerificationError,
)
from .fluxes import UNVERIFIED, ConservationLaw
from .multipliers import characteristic_form
from .parser import Context, parse_expression
from .pipeline import METHOD_ORDER, agreement, find_multipliers, run_fluxes, search_multipliers
from .problemfile import Problem, load_problem, parse_base_point, parse_multiplier, parse_weights
from .report import build_report, diagnostic, dumps, to_text
from .verify import (
    euler_annihilation,
    triviality_heuristic,
    verify_characteristic,
    verify_on_solutions,
)

EXIT_OK, EXIT_OTHER, EXIT_PARSE, EXIT_EMPTY, EXIT_INAPPLICABLE, EXIT_VERIFY = 0, 1, 2, 3, 4, 5


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside parentheses and brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        out.append(tail)
    return [s for s in out if s]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conslaw", description=(
        "Conservation laws of PDE systems: multipliers by the direct method, fluxes by "
        "direct matching, homotopy operators or scaling symmetries."))
    ap.add_argument("--version", action="version", version=f"conslaw {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("problem", help="problem file (.json, or the line format)")
        p.add_argument("--json", action="store_true",
                       help="JSON report on stdout and JSON diagnostics on stderr")
        p.add_argument("--latex", action="store_true", help="also show LaTeX in the text report")
        p.add_argument("--out", help="write the report to this file instead of stdout")

    def ansatz(p):
        p.add_argument("--deps", help="comma-separated ansatz atoms, e.g. t,x,u,u_x,u_xx")
        p.add_argument("--degree", type=int, help="total degree of the multiplier ansatz")
        p.add_argument("--atom-degree", type=int, help="maximum power of any single atom")

    p = sub.add_parser("multipliers", help="find multipliers over a polynomial ansatz")
    common(p)
    ansatz(p)

    p = sub.add_parser("fluxes", help="reconstruct fluxes for each multiplier")
    common(p)
    ansatz(p)
    p.add_argument("--method", choices=METHOD_ORDER + ("all",),
                   help="flux method; default: direct with arbitrary functions, scaling when "
                        "a declared scaling is noncritical, homotopy2 otherwise")
    p.add_argument("--multiplier", action="append", default=[],
                   help="use this multiplier instead of solving (components separated by ';')")
    p.add_argument("--base-point", help="homotopy2 base point, e.g. u=x")
    p.add_argument("--weights", action="append", default=[],
                   help="scaling weights, e.g. x=1,t=3,u=-2 (repeatable)")
    p.add_argument("--flux-order", type=int, help="jet order of the direct flux ansatz")
    p.add_argument("--flux-degree", type=int, help="degree of the direct flux ansatz")

    p = sub.add_parser("verify", help="check a multiplier and optionally a flux tuple")
    common(p)
    p.add_argument("--multiplier", help="multiplier components separated by ';'")
    p.add_argument("--flux", action="append", default=[],
                   help="one flux component per independent variable, in declaration order")
    return ap


class _Output:
    def __init__(self, args):
        self.args = args

    def report(self, rep: dict) -> None:
        text = dumps(rep) if self.args.json else to_text(rep, self.args.latex)
        if self.args.out:
            with open(self.args.out, "w") as fh:
                fh.write(text)
        else:
            _sys.stdout.write(text)

    def diag(self, err: Exception, **extra) -> None:
        if self.args.json:
            print(diagnostic(err, **extra), file=_sys.stderr)
        else:
            where = "".join(f" {k}={v}" for k, v in sorted(extra.items()))
            print(f"conslaw: {type(err).__name__}: {err}{where}", file=_sys.stderr)


def _ansatz_overrides(args, problem: Problem) -> dict:
    kw = {}
    if args.deps:
        ctx = Context.of(problem.system)
        kw["dependence"] = [parse_expression(s, ctx) for s in split_top(args.deps)]
    if args.degree is not None:
        kw["degree"] = args.degree
    if args.atom_degree is not None:
        kw["atom_degree"] = args.atom_degree
    return kw


def _multipliers(args, problem: Problem):
    given = getattr(args, "multiplier", None) or []
    if given:
        return [parse_multiplier(m, problem.system) for m in given]
    if problem.multipliers and not (args.deps or args.degree is not None):
        return list(problem.multipliers)
    return find_multipliers(problem, **_ansatz_overrides(args, problem))


def cmd_multipliers(args, out: _Output, problem: Problem) -> int:
    if args.deps is None and args.degree is None and problem.ansatz is None and problem.multipliers:
        ms, notes = list(problem.multipliers), []
    else:
        ms, notes = search_multipliers(problem, **_ansatz_overrides(args, problem))
    out.report(build_report(problem.system, problem.name, ms, scalings=problem.scalings, notes=notes))
    return EXIT_OK if ms else EXIT_EMPTY


def cmd_fluxes(args, out: _Output, problem: Problem) -> int:
    if args.weights:
        problem.scalings = tuple(parse_weights(w.replace(",", " "), problem.system)
                                 for w in args.weights)
    base = parse_base_point(args.base_point, problem.system) if args.base_point else None
    spec = problem.flux_spec
    if args.flux_order is not None or args.flux_degree is not None:
        spec = replace(spec, order=args.flux_order if args.flux_order is not None else spec.order,
                       degree=args.flux_degree if args.flux_degree is not None else spec.degree)
    ms = _multipliers(args, problem)
    if not ms:
        out.report(build_report(problem.system, problem.name, []))
        return EXIT_EMPTY
    if args.method == "all":
        methods = list(METHOD_ORDER)
    elif args.method:
        methods = [args.method]
    else:
        methods = None
    outcomes = run_fluxes(problem, ms, methods, base, spec)
    lines = agreement(problem.system, outcomes) if args.method == "all" else []
    out.report(build_report(problem.system, problem.name, ms, outcomes, lines, problem.scalings))
    failed = [o for o in outcomes if isinstance(o.error, VerificationError)
              or (o.law is not None and not all(o.checks.values()))]
    inapplicable = [o for o in outcomes if isinstance(o.error, MethodInapplicable)]
    for o in outcomes:
        if o.error is not None:
            out.diag(o.error, multiplier=o.multiplier + 1, method=o.method)
    if failed:
        return EXIT_VERIFY
    if args.method == "all":
        return EXIT_OK if any(o.law is not None for o in outcomes) else EXIT_INAPPLICABLE
    return EXIT_INAPPLICABLE if inapplicable else EXIT_OK


def cmd_verify(args, out: _Output, problem: Problem) -> int:
    sys = problem.system
    if not args.multiplier and not args.flux:
        raise ProblemError("verify needs --multiplier, --flux, or both")
    lam = parse_multiplier(args.multiplier, sys) if args.multiplier else None
    checks: dict[str, bool] = {}
    residuals: dict[str, str] = {}
    if lam is not None:
        checks["multiplier"] = euler_annihilation(characteristic_form(sys, lam.multipliers), sys.m)
    outcome_law = None
    if args.flux:
        if len(args.flux) != sys.n:
            raise ProblemError(f"give {sys.n} --flux components, one per independent variable")
        ctx = Context.of(sys)
        fluxes = tuple(parse_expression(f, ctx) for f in args.flux)
        outcome_law = ConservationLaw(fluxes, "given", lam, UNVERIFIED)
        reps = [verify_on_solutions(sys, outcome_law)]
        if lam is not None:
            reps.insert(0, verify_characteristic(sys, outcome_law))
        for r in reps:
            checks.update(r.checks)
            residuals.update(r.residuals)
    rep = build_report(sys, problem.name, [lam] if lam is not None else [])
    rep["verification"] = {"checks": checks, "residuals": residuals}
    if outcome_law is not None:
        rep["verification"]["triviality"] = triviality_heuristic(sys, outcome_law)
    if args.json:
        out.report(rep)
    else:
        text = to_text(rep, args.latex)
        text += "verification:\n" + "".join(
            f"  {k}: {'pass' if ok else 'FAIL'}\n" for k, ok in sorted(checks.items()))
        text += "".join(f"  residual {k}: {v}\n" for k, v in sorted(residuals.items()))
        if outcome_law is not None:
            text += f"  triviality: {rep['verification']['triviality']}\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            _sys.stdout.write(text)
    return EXIT_OK if all(checks.values()) else EXIT_VERIFY


COMMANDS = {"multipliers": cmd_multipliers, "fluxes": cmd_fluxes, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = _Output(args)
    try:
        problem = load_problem(args.problem)
        return COMMANDS[args.command](args, out, problem)
    except (ParseError, ProblemError, ExpressionError, json.JSONDecodeError, OSError) as exc:
        out.diag(exc)
        return EXIT_PARSE
    except EmptyAnsatz as exc:
        out.diag(exc)
        return EXIT_EMPTY
    except MethodInapplicable as exc:
        out.diag(exc)
        return EXIT_INAPPLICABLE
    except VerificationError as exc:
        out.diag(exc)
        return EXIT_VERIFY
    except ConslawError as exc:
        out.diag(exc)
        return EXIT_OTHER


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
