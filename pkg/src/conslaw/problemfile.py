"""Problem files: a JSON schema and an equivalent line-based format.

Line format (``#`` starts a comment; indented lines continue a function)::

    name kdv
    independents t x
    dependents u
    equation u_t = -u*u_x - u_xxx
    function c(1) arbitrary
    function C2(1) defined homogeneity=1/2
        derivative c(#1)^2
        power 2 -> #1
    ansatz t, x, u, u_x, u_xx
    degree 2
    atom_degree 2
    methods homotopy2 scaling
    scaling t=3 x=1 u=-2
    base_point u = x
    multiplier x - t*u
    symmetry u_x
    flux_ansatz order=2 degree=4

Components of a multiplier or symmetry characteristic are separated by ``;``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .errors import ParseError, ProblemError
from .expr import DiffExpr, FunctionDecl
from .fluxes.direct import FluxSpec
from .fluxes.scaling import ScalingSymmetry
from .multipliers import MultiplierSet
from .parser import Context, parse_expression, parse_jet, parse_rational
from .problem import Equation, PDESystem, validate_solved_form

METHODS = ("direct", "homotopy1", "homotopy2", "scaling", "pair")
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9]*$")


@dataclass(frozen=True)
class AnsatzSpec:
    dependence: tuple[DiffExpr, ...]
    degree: int = 3
    atom_degree: int | None = None


@dataclass
class Problem:
    system: PDESystem
    name: str = ""
    ansatz: AnsatzSpec | None = None
    methods: tuple[str, ...] = ()
    scalings: tuple[ScalingSymmetry, ...] = ()
    base_point: dict[int, DiffExpr] = field(default_factory=dict)
    multipliers: tuple[MultiplierSet, ...] = ()
    symmetries: tuple[tuple[DiffExpr, ...], ...] = ()
    flux_spec: FluxSpec = field(default_factory=FluxSpec)

    @property
    def context(self) -> Context:
        return Context.of(self.system)


@dataclass
class _FunctionSpec:
    name: str
    arity: int
    kind: str = "arbitrary"
    homogeneity: str | None = None
    derivatives: list[tuple[str, int]] = field(default_factory=list)
    power: tuple[int, str, int] | None = None
    line: int = 0


# shared assembly

def _names(values: Sequence[str], what: str) -> tuple[str, ...]:
    out = tuple(values)
    if not out:
        raise ProblemError(f"no {what} declared")
    for v in out:
        if not _NAME.match(v) or v in ("diff", "lambda"):
            raise ProblemError(f"invalid {what[:-1]} name {v!r}")
    if len(set(out)) != len(out):
        raise ProblemError(f"duplicate {what}")
    return out


def _declare(specs: Sequence[_FunctionSpec], indep, deps) -> dict[str, FunctionDecl]:
    decls: dict[str, FunctionDecl] = {}
    for f in specs:
        if f.name in decls or f.name in indep or f.name in deps or f.name in ("diff", "lambda"):
            raise ProblemError(f"function name {f.name!r} clashes with another symbol")
        h = parse_rational(f.homogeneity) if f.homogeneity is not None else None
        decls[f.name] = FunctionDecl(f.name, f.arity, f.kind, h)
    ctx = Context(indep, deps, decls, placeholders=True)
    for f in specs:
        decl = decls[f.name]
        if f.kind == "arbitrary":
            if f.derivatives or f.power:
                raise ProblemError(f"arbitrary function {f.name} cannot carry rules")
            continue
        if len(f.derivatives) != f.arity:
            raise ProblemError(f"defined function {f.name} needs {f.arity} derivative rule(s), "
                               f"got {len(f.derivatives)}")
        ders = [parse_expression(text, ctx, line) for text, line in f.derivatives]
        power = None
        if f.power is not None:
            k, text, line = f.power
            power = (k, parse_expression(text, ctx, line))
        try:
            decl.define(ders, power)
        except ValueError as exc:
            raise ProblemError(f"function {f.name}: {exc}") from None
    return decls


def _equation(lhs: str, rhs: str, ctx: Context, line: int, column: int = 1) -> Equation:
    try:
        lead = parse_jet(lhs, ctx)
    except ParseError:
        raise ProblemError(f"line {line}: the left-hand side {lhs.strip()!r} must be a single "
                           "derivative of a dependent variable") from None
    return Equation(lead, parse_expression(rhs, ctx, line, column + len(lhs) + 1))


def _system(indep, deps, functions, equations) -> PDESystem:
    sys = PDESystem(indep, deps, tuple(equations), functions)
    if not sys.equations:
        raise ProblemError("no equations declared")
    rep = validate_solved_form(sys)
    if not rep:
        raise ProblemError("the system is not in solved form: " + "; ".join(rep.violations),
                           rep.violations)
    return sys


def parse_weights(text: str | Mapping[str, Any], sys: PDESystem) -> ScalingSymmetry:
    """``x=1, t=3, u=-2`` (or a mapping) into a scaling; unlisted names weigh 0."""
    if isinstance(text, str):
        pairs = {}
        for part in re.split(r"[,\s]+", text.strip()):
            if not part:
                continue
            if "=" not in part:
                raise ParseError(f"expected name=weight, got {part!r}")
            k, v = part.split("=", 1)
            pairs[k.strip()] = v.strip()
    else:
        pairs = {k: str(v) for k, v in text.items()}
    for k in pairs:
        if k not in sys.independents and k not in sys.dependents:
            raise ProblemError(f"scaling weight for unknown symbol {k!r}")
    p = tuple(parse_rational(pairs.get(v, "0")) for v in sys.independents)
    q = tuple(parse_rational(pairs.get(v, "0")) for v in sys.dependents)
    return ScalingSymmetry(p, q)


def parse_base_point(text: str | Mapping[str, str], sys: PDESystem) -> dict[int, DiffExpr]:
    """``u=x, v=0`` (or a mapping) into {dependent index: expression}."""
    if isinstance(text, str):
        items = {}
        for part in text.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise ParseError(f"expected name=expression, got {part.strip()!r}")
            k, v = part.split("=", 1)
            items[k.strip()] = v
    else:
        items = dict(text)
    ctx = Context.of(sys)
    out = {}
    for k, v in items.items():
        if k not in sys.dependents:
            raise ProblemError(f"base point for unknown dependent variable {k!r}")
        out[sys.dependents.index(k)] = parse_expression(str(v), ctx)
    return out


def parse_multiplier(parts: str | Sequence[str], sys: PDESystem, line: int = 1) -> MultiplierSet:
    if isinstance(parts, str):
        parts = parts.split(";")
    if len(parts) != sys.N:
        raise ProblemError(f"a multiplier needs {sys.N} component(s), got {len(parts)}")
    ctx = Context.of(sys)
    return MultiplierSet(tuple(parse_expression(str(p), ctx, line) for p in parts), ("user", ()))


def parse_symmetry(parts: str | Sequence[str], sys: PDESystem, line: int = 1) -> tuple[DiffExpr, ...]:
    """Evolutionary characteristic, one component per dependent variable."""
    if isinstance(parts, str):
        parts = parts.split(";")
    if len(parts) != sys.m:
        raise ProblemError(f"a symmetry characteristic needs {sys.m} component(s), got {len(parts)}")
    ctx = Context.of(sys)
    return tuple(parse_expression(str(p), ctx, line) for p in parts)


def _methods(items: Sequence[str]) -> tuple[str, ...]:
    for m in items:
        if m not in METHODS:
            raise ProblemError(f"unknown method {m!r}; expected one of {', '.join(METHODS)}")
    return tuple(items)


def _flux_spec(d: Mapping[str, Any], ctx: Context) -> FluxSpec:
    known = {"order", "degree", "atom_degree", "extra"}
    for k in d:
        if k not in known:
            raise ProblemError(f"unknown flux_ansatz key {k!r}")
    extra = tuple(parse_expression(str(e), ctx) for e in d.get("extra", ()))
    ints = {k: int(d[k]) for k in ("order", "degree", "atom_degree") if d.get(k) is not None}
    return FluxSpec(extra_atoms=extra, **ints)


# JSON

def problem_from_dict(d: Mapping[str, Any]) -> Problem:
    known = {"name", "independents", "dependents", "functions", "equations", "ansatz", "methods",
             "scaling", "base_point", "multipliers", "symmetries", "flux_ansatz"}
    for k in d:
        if k not in known:
            raise ProblemError(f"unknown key {k!r}")
    indep = _names(d.get("independents", ()), "independents")
    deps = _names(d.get("dependents", ()), "dependents")
    specs = []
    for f in d.get("functions", ()):
        power = f.get("power_rule")
        specs.append(_FunctionSpec(
            f["name"], int(f.get("arity", 1)), f.get("kind", "arbitrary"),
            None if f.get("homogeneity") is None else str(f["homogeneity"]),
            [(str(r), 1) for r in f.get("derivatives", ())],
            None if power is None else (int(power[0]), str(power[1]), 1)))
    functions = _declare(specs, indep, deps)
    ctx = Context(indep, deps, functions)
    eqs = []
    for k, e in enumerate(d.get("equations", ())):
        if isinstance(e, str):
            if "=" not in e:
                raise ProblemError(f"equation {k + 1} has no '='")
            lhs, rhs = e.split("=", 1)
        else:
            lhs, rhs = e["lhs"], e["rhs"]
        eqs.append(_equation(lhs, rhs, ctx, 1))
    sys = _system(indep, deps, functions, eqs)
    pb = Problem(sys, name=str(d.get("name", "")))
    if "ansatz" in d:
        a = d["ansatz"]
        pb.ansatz = AnsatzSpec(tuple(parse_expression(str(x), ctx) for x in a["dependence"]),
                               int(a.get("degree", 3)),
                               None if a.get("atom_degree") is None else int(a["atom_degree"]))
    pb.methods = _methods(d.get("methods", ()))
    sc = d.get("scaling", ())
    if isinstance(sc, (str, dict)):
        sc = [sc]
    pb.scalings = tuple(parse_weights(s, sys) for s in sc)
    if "base_point" in d:
        pb.base_point = parse_base_point(d["base_point"], sys)
    pb.multipliers = tuple(parse_multiplier(m if isinstance(m, str) else list(m), sys)
                           for m in d.get("multipliers", ()))
    pb.symmetries = tuple(parse_symmetry(s if isinstance(s, str) else list(s), sys)
                          for s in d.get("symmetries", ()))
    pb.flux_spec = _flux_spec(d.get("flux_ansatz", {}), ctx)
    return pb


# line format

def _kv(text: str, line: int) -> dict[str, str]:
    out = {}
    for part in text.split():
        if "=" not in part:
            raise ParseError(f"expected key=value, got {part!r}", line)
        k, v = part.split("=", 1)
        out[k] = v
    return out


_FUNC = re.compile(r"([A-Za-z][A-Za-z0-9]*)\s*\(\s*(\d+)\s*\)\s*(arbitrary|defined)?\s*(.*)$")


def problem_from_text(text: str) -> Problem:
    d: dict[str, Any] = {}
    specs: list[_FunctionSpec] = []
    eq_lines: list[tuple[str, int, int]] = []
    mult_lines: list[tuple[str, int]] = []
    sym_lines: list[tuple[str, int]] = []
    scal: list[str] = []
    ans: dict[str, Any] = {}
    current: _FunctionSpec | None = None
    for no, raw in enumerate(text.splitlines(), 1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        indented = body[0].isspace()
        key, _, rest = body.strip().partition(" ")
        rest = rest.strip()
        if indented:
            if current is None:
                raise ParseError("indented line outside a function block", no)
            if key == "derivative":
                current.derivatives.append((rest, no))
            elif key == "power":
                k, arrow, val = rest.partition("->")
                if not arrow:
                    raise ParseError("power rule must read 'power k -> expression'", no)
                current.power = (int(k), val, no)
            else:
                raise ParseError(f"unknown function rule {key!r}", no)
            continue
        current = None
        if key == "name":
            d["name"] = rest
        elif key in ("independents", "dependents"):
            d[key] = [v for v in re.split(r"[,\s]+", rest) if v]
        elif key == "equation":
            eq_lines.append((rest, no, body.index(rest, body.index(key) + len(key)) + 1))
        elif key == "function":
            m = _FUNC.match(rest)
            if not m:
                raise ParseError("function lines read 'function name(arity) kind [homogeneity=h]'", no)
            opts = _kv(m.group(4), no)
            current = _FunctionSpec(m.group(1), int(m.group(2)), m.group(3) or "arbitrary",
                                    opts.pop("homogeneity", None), line=no)
            if opts:
                raise ParseError(f"unknown function option {next(iter(opts))!r}", no)
            specs.append(current)
        elif key == "ansatz":
            ans["dependence"] = ([v.strip() for v in rest.split(",") if v.strip()], no)
        elif key in ("degree", "atom_degree"):
            ans[key] = int(rest)
        elif key == "methods":
            d["methods"] = [v for v in re.split(r"[,\s]+", rest) if v]
        elif key == "scaling":
            scal.append(rest)
        elif key == "base_point":
            d["base_point"] = rest
        elif key == "multiplier":
            mult_lines.append((rest, no))
        elif key == "symmetry":
            sym_lines.append((rest, no))
        elif key == "flux_ansatz":
            d["flux_ansatz"] = _kv(rest, no)
        else:
            raise ParseError(f"unknown directive {key!r}", no)
    indep = _names(d.get("independents", ()), "independents")
    deps = _names(d.get("dependents", ()), "dependents")
    functions = _declare(specs, indep, deps)
    ctx = Context(indep, deps, functions)
    eqs = []
    for text_, no, col in eq_lines:
        lhs, eq, rhs = text_.partition("=")
        if not eq:
            raise ParseError("equation has no '='", no)
        eqs.append(_equation(lhs, rhs, ctx, no, col))
    sys = _system(indep, deps, functions, eqs)
    pb = Problem(sys, name=d.get("name", ""))
    if "dependence" in ans:
        items, no = ans["dependence"]
        pb.ansatz = AnsatzSpec(tuple(parse_expression(x, ctx, no) for x in items),
                               ans.get("degree", 3), ans.get("atom_degree"))
    pb.methods = _methods(d.get("methods", ()))
    pb.scalings = tuple(parse_weights(s, sys) for s in scal)
    if "base_point" in d:
        pb.base_point = parse_base_point(d["base_point"], sys)
    pb.multipliers = tuple(parse_multiplier(t, sys, no) for t, no in mult_lines)
    pb.symmetries = tuple(parse_symmetry(t, sys, no) for t, no in sym_lines)
    pb.flux_spec = _flux_spec(d.get("flux_ansatz", {}), ctx)
    return pb


def _strip_comment(raw: str) -> str:
    # '#' followed by a digit is a placeholder, any other '#' starts a comment
    m = re.search(r"#(?!\d)", raw)
    return raw if m is None else raw[:m.start()]


def load_problem(path: str | Path) -> Problem:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return problem_from_dict(data)
    return problem_from_text(text)
