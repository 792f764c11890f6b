"""Fluxes by direct matching: solve D_i Phi^i = Lambda_sigma R^sigma over a
finite monomial ansatz."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .. import poly as P
from ..calculus import divergence, jet_order, total_derivative
from ..errors import NoFluxInAnsatz, VerificationError
from ..expr import (
    DiffExpr,
    FunctionAtom,
    IndependentVar,
    JetCoord,
    MultiIndex,
    Param,
    as_expr,
    atom,
    atom_id,
    atom_of,
    expr_sum,
    func,
    jet,
    monomial_expr,
    monomial_key,
)
from ..linalg import solve
from ..multipliers import MultiplierSet, characteristic_form, split_linear_system
from ..problem import PDESystem
from ..render import render
from .law import CHARACTERISTIC, ConservationLaw

MAX_CANDIDATES = 4000


@dataclass(frozen=True)
class FluxSpec:
    """Flux ansatz controls; ``None`` means the default derived from Lambda R."""

    order: int | None = None
    degree: int | None = None
    atom_degree: int | None = None
    extra_atoms: tuple[DiffExpr, ...] = ()
    max_candidates: int = MAX_CANDIDATES


def _degree(m: tuple) -> int:
    return sum(e for e in m[1::2] if e > 0)


def _linear_in_top_jets(f: DiffExpr, r: int) -> bool:
    for m in f.terms:
        k = 0
        for n in range(0, len(m), 2):
            a = atom_of(m[n])
            if isinstance(a, JetCoord) and a.order == r:
                k += m[n + 1]
        if k > 1:
            return False
    return True


class _Space:
    """Allowed atoms and exponent caps of a flux ansatz."""

    def __init__(self, sys: PDESystem, f: DiffExpr, order: int, degree: int,
                 atom_degree: int | None, extra: Sequence[DiffExpr]):
        self.n = sys.n
        self.order = order
        self.degree = degree
        lo: dict[int, int] = {}
        hi: dict[int, int] = {}
        for m in f.terms:
            for k in range(0, len(m), 2):
                a, e = m[k], m[k + 1]
                lo[a] = min(lo.get(a, 0), e)
                hi[a] = max(hi.get(a, 0), e)
        jet_hi = max((e for a, e in hi.items() if isinstance(atom_of(a), JetCoord)), default=1)
        self.lo = lo
        self.cap: dict[int, int] = {}
        atoms: list[int] = []
        for i in range(sys.n):
            atoms.append(atom_id(IndependentVar(i)))
        for rho in range(sys.m):
            for J in _multis(sys.n, order):
                atoms.append(atom_id(JetCoord(rho, J)))
        for a in sorted(hi, key=lambda a: atom_of(a).sort_key()):
            if isinstance(atom_of(a), FunctionAtom) and a not in atoms:
                atoms.append(a)
        for decl in sys.functions.values():
            if decl.kind == "defined" and decl.arity == 1 and decl.derivatives is not None:
                for rho in range(sys.m):
                    a = atom_id(_first_atom(func(decl, [jet(rho, (0,) * sys.n)])))
                    if a not in atoms:
                        atoms.append(a)
        for e in extra:
            a = atom_id(_first_atom(as_expr(e)))
            if a not in atoms:
                atoms.append(a)
        self.atoms = atoms
        self.allowed = set(atoms)
        for a in atoms:
            b = atom_of(a)
            if atom_degree is not None:
                self.cap[a] = atom_degree
            elif isinstance(b, JetCoord):
                self.cap[a] = jet_hi + 1
            else:
                self.cap[a] = hi.get(a, 0) + 1
        # derivatives of every allowed atom, by direction
        self.dterms: dict[tuple[int, int], list[tuple]] = {}
        for a in atoms:
            for i in range(sys.n):
                d = total_derivative(atom(atom_of(a)), i)
                self.dterms[(a, i)] = list(d.terms)

    def admits(self, m: tuple) -> bool:
        if _degree(m) > self.degree:
            return False
        for k in range(0, len(m), 2):
            a, e = m[k], m[k + 1]
            if a not in self.allowed:
                return False
            if e > self.cap[a] or e < self.lo.get(a, 0):
                return False
        return True


def _first_atom(e: DiffExpr):
    (m,) = e.terms
    return atom_of(m[0])


def _multis(n: int, order: int) -> list[MultiIndex]:
    out = []
    for c in product(range(order + 1), repeat=n):
        if sum(c) <= order:
            out.append(MultiIndex(c))
    return sorted(out, key=lambda J: (J.order, tuple(-x for x in J)))


def _closure(space: _Space, f: DiffExpr, limit: int) -> list[tuple[int, tuple]] | None:
    """Candidate (direction, monomial) pairs whose derivatives can reach f."""
    cands: dict[tuple[int, tuple], None] = {}
    seen: set[tuple] = set()
    queue = deque(sorted(f.terms, key=monomial_key))
    n = space.n
    while queue:
        M = queue.popleft()
        if M in seen:
            continue
        seen.add(M)
        jetful = any(not isinstance(atom_of(M[k]), IndependentVar) for k in range(0, len(M), 2))
        for i in range(n):
            for a in space.atoms:
                b = atom_of(a)
                if isinstance(b, IndependentVar) and jetful:
                    continue
                for mu in space.dterms[(a, i)]:
                    cand = P.mono_mul(P.mono_mul(M, P.mono_inv(mu)), (a, 1))
                    key = (i, cand)
                    if key in cands or not space.admits(cand):
                        continue
                    cands[key] = None
                    if len(cands) > limit:
                        return None
                    for t in total_derivative(monomial_expr(cand), i).terms:
                        if t not in seen:
                            queue.append(t)
    return list(cands)


def _exhaustive(space: _Space, limit: int) -> list[tuple[int, tuple]] | None:
    monos: list[tuple] = [()]
    for a in space.atoms:
        nxt = []
        for m in monos:
            for e in range(space.cap[a] + 1):
                mm = P.mono_mul(m, (a, e)) if e else m
                if _degree(mm) <= space.degree:
                    nxt.append(mm)
            if len(nxt) * space.n > limit:
                return None
        monos = nxt
    return [(i, m) for i in range(space.n) for m in monos if m]


def _solve_over(sys: PDESystem, f: DiffExpr, cands: list[tuple[int, tuple]]):
    cands = sorted(set(cands), key=lambda c: (_degree(c[1]), c[0], monomial_key(c[1])))
    unknowns = [Param(f"a[{k}]") for k in range(len(cands))]
    lhs = expr_sum(atom(u) * total_derivative(monomial_expr(m), i)
                   for u, (i, m) in zip(unknowns, cands))
    lin = split_linear_system([lhs - f], unknowns)
    v = solve(lin.rows, lin.rhs, lin.ncols, list(range(lin.ncols)))
    if v is None:
        return None, lin
    fluxes = []
    for i in range(sys.n):
        fluxes.append(expr_sum(c * monomial_expr(m) for c, (j, m) in zip(v, cands) if c and j == i))
    return tuple(fluxes), lin


def flux_direct(sys: PDESystem, lam: MultiplierSet, spec: FluxSpec | None = None) -> ConservationLaw:
    """Match D_i Phi^i = Lambda R over a flux ansatz; any particular solution.

    The ansatz is the closure of the monomials of Lambda R under "which
    monomial can produce this term by one total derivative", cut off by the
    jet order max(l, k) (one less when Lambda R is linear in its top jets),
    degree deg(Lambda R) + 1 and per-atom caps.  Free coefficients of the
    solution are set to zero, high-degree columns first.
    """
    spec = spec or FluxSpec()
    f = characteristic_form(sys, lam.multipliers)
    if not f:
        return ConservationLaw((as_expr(0),) * sys.n, "direct", lam, CHARACTERISTIC)
    k = sys.order
    l = max((jet_order(x) for x in lam.multipliers), default=0)
    r = max(k, l)
    if spec.order is not None:
        orders = [spec.order]
    elif r > 0 and _linear_in_top_jets(f, r):
        orders = [r - 1, r]
    else:
        orders = [r]
    degree = spec.degree if spec.degree is not None else max(_degree(m) for m in f.terms) + 1
    last = None
    for order in orders:
        space = _Space(sys, f, order, degree, spec.atom_degree, spec.extra_atoms)
        for builder in (lambda: _closure(space, f, spec.max_candidates),
                        lambda: _exhaustive(space, spec.max_candidates)):
            cands = builder()
            if not cands:
                continue
            fluxes, lin = _solve_over(sys, f, cands)
            if fluxes is None:
                last = lin
                continue
            residual = f - divergence(fluxes)
            if not residual.is_zero():
                raise VerificationError("direct fluxes fail the characteristic identity",
                                        render(residual, sys.names))
            notes = tuple(f"{render(a, sys.names)} != 0" for a in lin.assumptions)
            return ConservationLaw(fluxes, "direct", lam, CHARACTERISTIC, assumptions=notes)
    raise NoFluxInAnsatz(
        "no flux tuple in the ansatz matches Lambda R; enlarge the flux order or degree",
        render(f, sys.names) if last is None else _unmatched(last, sys))


def _unmatched(lin, sys: PDESystem) -> str:
    parts = [render(mono, sys.names) for (q, mono), b in zip(lin.provenance, lin.rhs) if b]
    return ", ".join(parts[:8])
