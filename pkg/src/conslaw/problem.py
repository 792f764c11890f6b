"""PDE systems in solved form and multiplier ansatz spaces."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import EmptyAnsatz
from .expr import (
    DiffExpr,
    FunctionAtom,
    FunctionDecl,
    IndependentVar,
    JetCoord,
    Param,
    as_expr,
    atom,
    atom_of,
    expr_sum,
)
from .render import Names, render, render_atom


@dataclass(frozen=True)
class Equation:
    leading: JetCoord
    rhs: DiffExpr
    weight: Fraction | None = None

    @property
    def R(self) -> DiffExpr:
        """The equation as an expression vanishing on solutions: leading - rhs."""
        return atom(self.leading) - self.rhs


@dataclass(frozen=True, eq=False)
class PDESystem:
    independents: tuple[str, ...]
    dependents: tuple[str, ...]
    equations: tuple[Equation, ...]
    functions: dict[str, FunctionDecl] = field(default_factory=dict)
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.independents)

    @property
    def m(self) -> int:
        return len(self.dependents)

    @property
    def N(self) -> int:
        return len(self.equations)

    @property
    def names(self) -> Names:
        return Names(self.independents, self.dependents)

    @property
    def R(self) -> tuple[DiffExpr, ...]:
        return tuple(eq.R for eq in self.equations)

    @property
    def order(self) -> int:
        from .calculus import jet_order
        return max((jet_order(r) for r in self.R), default=0)

    def var(self, name: str) -> DiffExpr:
        return atom(IndependentVar(self.independents.index(name)))

    def u(self, name: str | int = 0, *derivs: str) -> DiffExpr:
        """Jet coordinate by names, e.g. ``sys.u("u", "x", "x")`` for u_xx."""
        dep = name if isinstance(name, int) else self.dependents.index(name)
        counts = [0] * self.n
        for d in derivs:
            counts[self.independents.index(d)] += 1
        from .expr import jet
        return jet(dep, counts)

    def render(self, e: DiffExpr) -> str:
        return render(e, self.names)

    def is_eliminable(self, a: JetCoord) -> bool:
        """True if a is a leading derivative or a differential consequence of one."""
        return any(eq.leading.dep == a.dep and eq.leading.multi.le(a.multi)
                   for eq in self.equations)

    def has_arbitrary_functions(self) -> bool:
        return any(_has_arbitrary(r) for r in self.R)


def _has_arbitrary(e: DiffExpr) -> bool:
    return any(isinstance(a, FunctionAtom) and a.kind == "arbitrary" for a in e.free_atoms())


has_arbitrary = _has_arbitrary


@dataclass
class ValidationReport:
    valid: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


def validate_solved_form(sys: PDESystem) -> ValidationReport:
    """Check that no rhs contains a leading derivative or a consequence of one."""
    names = sys.names
    out: list[str] = []
    leads = [eq.leading for eq in sys.equations]
    for k, a in enumerate(leads):
        for j, b in enumerate(leads):
            if j != k and b.dep == a.dep and b.multi.le(a.multi):
                what = "repeats" if a == b else "is a differential consequence of"
                if a != b or j < k:
                    out.append(f"equation {k + 1}: leading derivative {render_atom(a, names)} "
                               f"{what} the leading derivative of equation {j + 1}")
    for k, eq in enumerate(sys.equations):
        for a in sorted(eq.rhs.free_atoms(), key=lambda a: a.sort_key()):
            if isinstance(a, JetCoord) and sys.is_eliminable(a):
                out.append(f"equation {k + 1}: right-hand side contains {render_atom(a, names)}, "
                           "a leading derivative or one of its differential consequences")
    return ValidationReport(not out, out)


def check_ck_form(sys: PDESystem, j: int) -> tuple[bool, list[str]]:
    """Cauchy-Kovalevskaya form with respect to independent variable j."""
    notes: list[str] = []
    if sys.N != sys.m:
        return False, [f"{sys.N} equations for {sys.m} dependent variables"]
    top: dict[int, int] = {}
    for k, eq in enumerate(sys.equations):
        L = eq.leading.multi
        if L.order != L[j]:
            notes.append(f"equation {k + 1} is not solved for a pure {sys.independents[j]}-derivative")
        elif eq.leading.dep in top:
            notes.append(f"dependent {sys.dependents[eq.leading.dep]} is solved for twice")
        else:
            top[eq.leading.dep] = L[j]
    if notes:
        return False, notes
    for k, eq in enumerate(sys.equations):
        for a in eq.rhs.free_atoms():
            if isinstance(a, JetCoord) and a.multi[j] >= top[a.dep]:
                notes.append(f"equation {k + 1}: rhs contains {render_atom(a, sys.names)}")
    return not notes, notes


@dataclass(frozen=True)
class MultiplierAnsatz:
    """Per-equation monomial bases with one unknown coefficient per basis element."""

    bases: tuple[tuple[DiffExpr, ...], ...]
    unknowns: tuple[tuple[Param, ...], ...]
    ansatz_id: str = "ansatz"
    warnings: tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.bases)

    def multipliers(self) -> tuple[DiffExpr, ...]:
        return tuple(expr_sum(atom(c) * b for c, b in zip(cs, bs))
                     for cs, bs in zip(self.unknowns, self.bases))

    def columns(self) -> list[tuple[int, int]]:
        """(equation, basis index) for every unknown, in unknown order."""
        return [(s, k) for s, bs in enumerate(self.bases) for k in range(len(bs))]


def _monomials(atoms: Sequence[DiffExpr], degree: int, atom_degree: int) -> list[DiffExpr]:
    out = []
    for exps in product(range(atom_degree + 1), repeat=len(atoms)):
        if sum(exps) <= degree:
            out.append((sum(exps), tuple(-e for e in exps), exps))
    out.sort()
    res = []
    for _, _, exps in out:
        m = as_expr(1)
        for a, e in zip(atoms, exps):
            if e:
                m = m * a ** e
        res.append(m)
    return res


def generate_ansatz(sys: PDESystem, dependence: Iterable, degree: int = 3,
                    atom_degree: int | None = None, ansatz_id: str = "ansatz",
                    per_equation: Sequence[Iterable] | None = None) -> MultiplierAnsatz:
    """Enumerate monomials over the allowed atoms with per-atom and total caps.

    ``dependence`` lists atoms (or single-atom expressions).  Leading
    derivatives and their consequences are dropped with a warning.  The same
    dependence is used for every equation unless ``per_equation`` is given.
    """
    if atom_degree is None:
        atom_degree = degree
    deps = [list(dependence)] * sys.N if per_equation is None else [list(d) for d in per_equation]
    notes: list[str] = []
    bases = []
    for dl in deps:
        atoms: list[DiffExpr] = []
        for d in dl:
            e = as_expr(d)
            terms = list(e.terms.items())
            if len(terms) != 1 or terms[0][1] != 1 or len(terms[0][0]) != 2 or terms[0][0][1] != 1:
                raise ValueError(f"ansatz dependence entry {render(e, sys.names)} is not an atom")
            a = atom_of(terms[0][0][0])
            if isinstance(a, JetCoord) and sys.is_eliminable(a):
                msg = (f"{render_atom(a, sys.names)} is a leading derivative or a consequence "
                       "of one; excluded from the ansatz")
                if msg not in notes:
                    warnings.warn(msg, stacklevel=2)
                    notes.append(msg)
                continue
            if e not in atoms:
                atoms.append(e)
        bases.append(tuple(_monomials(atoms, degree, atom_degree)))
    if not any(bases):
        raise EmptyAnsatz("the multiplier ansatz has no basis monomials")
    unknowns = []
    k = 0
    for bs in bases:
        cs = []
        for _ in bs:
            k += 1
            cs.append(Param(f"c[{k}]"))
        unknowns.append(tuple(cs))
    return MultiplierAnsatz(tuple(bases), tuple(unknowns), ansatz_id, tuple(notes))
