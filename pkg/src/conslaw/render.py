"""Text rendering in the input grammar and in LaTeX."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import (
    Atom,
    DiffExpr,
    FunctionAtom,
    IndependentVar,
    JetCoord,
    Param,
    atom_key,
    atom_of,
    monomial_key,
)


@dataclass(frozen=True)
class Names:
    independents: tuple[str, ...] = ()
    dependents: tuple[str, ...] = ()

    def indep(self, i: int) -> str:
        return self.independents[i] if i < len(self.independents) else f"x{i + 1}"

    def dep(self, j: int) -> str:
        return self.dependents[j] if j < len(self.dependents) else f"u{j + 1}"

    def short_subscripts(self) -> bool:
        return all(len(v) == 1 for v in self.independents)


DEFAULT_NAMES = Names()


def _sorted_terms(e: DiffExpr):
    def key(item):
        m, _ = item
        deg = sum(m[n + 1] for n in range(0, len(m), 2))
        return (-deg, monomial_key(m))
    return sorted(e.terms.items(), key=key)


def _factors(m: tuple):
    pairs = [(m[n], m[n + 1]) for n in range(0, len(m), 2)]
    pairs.sort(key=lambda p: atom_key(p[0]))
    return pairs


def render_atom(a: Atom, names: Names = DEFAULT_NAMES) -> str:
    if isinstance(a, IndependentVar):
        return names.indep(a.index)
    if isinstance(a, Param):
        return a.name
    if isinstance(a, JetCoord):
        u = names.dep(a.dep)
        if a.multi.order == 0:
            return u
        idx = a.multi.indices()
        if names.short_subscripts() and len(names.independents) >= len(a.multi):
            return f"{u}_{{{''.join(names.indep(i) for i in idx)}}}"
        return f"diff({u}, {', '.join(names.indep(i) for i in idx)})"
    assert isinstance(a, FunctionAtom)
    args = ", ".join(render(g, names) for g in a.args)
    d = a.deriv
    if not any(d):
        head = a.name
    elif len(d) == 1:
        head = a.name + "'" * d[0]
    else:
        head = f"{a.name}'[{','.join(str(k) for k in d)}]"
    return f"{head}({args})"


def _coef_text(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


def render(e, names: Names = DEFAULT_NAMES) -> str:
    """Render in the input grammar; ``parse_expression`` reads it back."""
    if not isinstance(e, DiffExpr):
        return str(e)
    if not e.terms:
        return "0"
    parts: list[str] = []
    for m, c in _sorted_terms(e):
        neg = c < 0
        c = -c if neg else c
        fs = []
        for aid, k in _factors(m):
            s = render_atom(atom_of(aid), names)
            if k == 1:
                fs.append(s)
            elif k > 0:
                fs.append(f"{s}^{k}")
            else:
                fs.append(f"{s}^({k})")
        if c != 1 or not fs:
            fs.insert(0, _coef_text(c))
        body = "*".join(fs)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def _latex_name(s: str) -> str:
    if s == "lambda":
        return r"\lambda"
    if len(s) == 1:
        return s
    return rf"\mathrm{{{s}}}"


def latex_atom(a: Atom, names: Names = DEFAULT_NAMES) -> str:
    if isinstance(a, IndependentVar):
        return _latex_name(names.indep(a.index))
    if isinstance(a, Param):
        if a.name.startswith("#"):
            return rf"\#{a.name[1:]}"
        return _latex_name(a.name)
    if isinstance(a, JetCoord):
        u = _latex_name(names.dep(a.dep))
        if a.multi.order == 0:
            return u
        sub = "".join(_latex_name(names.indep(i)) for i in a.multi.indices())
        return f"{u}_{{{sub}}}"
    assert isinstance(a, FunctionAtom)
    args = ", ".join(render_latex(g, names) for g in a.args)
    d = a.deriv
    head = _latex_name(a.name)
    if any(d):
        if len(d) == 1:
            head += "'" * d[0]
        else:
            head += "_{(" + ",".join(str(k) for k in d) + ")}"
    return rf"{head}\left({args}\right)"


def render_latex(e, names: Names = DEFAULT_NAMES) -> str:
    if not isinstance(e, DiffExpr):
        return str(e)
    if not e.terms:
        return "0"
    parts: list[str] = []
    for m, c in _sorted_terms(e):
        neg = c < 0
        c = Fraction(-c if neg else c)
        fs = []
        for aid, k in _factors(m):
            s = latex_atom(atom_of(aid), names)
            fs.append(s if k == 1 else f"{s}^{{{k}}}")
        if c.denominator != 1:
            coef = rf"\tfrac{{{c.numerator}}}{{{c.denominator}}}"
        elif c != 1 or not fs:
            coef = str(c.numerator)
        else:
            coef = ""
        body = coef + " ".join(fs)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)
