"""Jet-space calculus: total derivatives, Euler operators, substitution of
dependent variables and reduction modulo a solved-form system."""
from __future__ import annotations

import os
from itertools import product
from math import comb
from typing import Iterable, Mapping, Sequence

from . import poly as P
from .errors import ReductionLimitExceeded
from .expr import (
    ONE,
    ZERO,
    Atom,
    DiffExpr,
    FunctionAtom,
    IndependentVar,
    JetCoord,
    MultiIndex,
    Param,
    as_expr,
    atom_id,
    atom_of,
    expr_sum,
    func,
    jet,
    subs,
)

_dcache: dict[tuple[int, int], DiffExpr] = {}
_slot_cache: dict[tuple[int, int], DiffExpr] = {}


def slot_derivative(fa: FunctionAtom, k: int) -> DiffExpr:
    """Partial derivative of a function atom with respect to argument slot k."""
    key = (atom_id(fa), k)
    r = _slot_cache.get(key)
    if r is not None:
        return r
    decl = fa.decl
    if decl.kind == "arbitrary":
        d = list(fa.deriv)
        d[k] += 1
        r = func(decl, fa.args, d)
    else:
        if decl.derivatives is None:
            raise ValueError(f"defined function {decl.name} has no derivative rules")
        r = subs(decl.derivatives[k], {Param(f"#{j + 1}"): g for j, g in enumerate(fa.args)})
    _slot_cache[key] = r
    return r


def _atom_total_derivative(aid: int, i: int) -> DiffExpr:
    key = (aid, i)
    r = _dcache.get(key)
    if r is not None:
        return r
    a = atom_of(aid)
    if isinstance(a, IndependentVar):
        r = ONE if a.index == i else ZERO
    elif isinstance(a, JetCoord):
        r = jet(a.dep, a.multi.bump(i))
    elif isinstance(a, Param):
        r = ZERO
    else:
        r = expr_sum(slot_derivative(a, k) * total_derivative(g, i)
                     for k, g in enumerate(a.args))
    _dcache[key] = r
    return r


def _chain(e: DiffExpr, dfun) -> DiffExpr:
    """Sum over atoms b of (d e / d b) * dfun(b) with b at top level."""
    acc: dict = {}
    for m, c in e.terms.items():
        for n in range(0, len(m), 2):
            aid, k = m[n], m[n + 1]
            d = dfun(aid)
            if not d:
                continue
            P.poly_iadd_term(acc, d.terms, P.mono_with(m, aid, k - 1), c * k)
    return DiffExpr._from(acc, True)


def total_derivative(e: DiffExpr, i: int) -> DiffExpr:
    """D_i e."""
    return _chain(as_expr(e), lambda aid: _atom_total_derivative(aid, i))


def total_derivative_multi(e: DiffExpr, J: Iterable[int]) -> DiffExpr:
    """D_J e for a multi-index J (counts per independent variable)."""
    for i, k in enumerate(J):
        for _ in range(k):
            e = total_derivative(e, i)
    return e


def divergence(fluxes: Sequence[DiffExpr]) -> DiffExpr:
    return expr_sum(total_derivative(f, i) for i, f in enumerate(fluxes))


def partial(e: DiffExpr, a: Atom) -> DiffExpr:
    """Partial derivative with respect to an atom, chaining through function arguments."""
    target = atom_id(a)
    memo: dict[int, DiffExpr] = {}

    def d(aid: int) -> DiffExpr:
        r = memo.get(aid)
        if r is None:
            if aid == target:
                r = ONE
            else:
                b = atom_of(aid)
                if isinstance(b, FunctionAtom):
                    r = expr_sum(slot_derivative(b, k) * partial(g, a)
                                 for k, g in enumerate(b.args))
                else:
                    r = ZERO
            memo[aid] = r
        return r

    return _chain(as_expr(e), d)


def jet_atoms(e: DiffExpr, dep: int | None = None) -> list[JetCoord]:
    """Jet coordinates occurring in e (also inside function arguments), sorted."""
    js = [a for a in e.free_atoms() if isinstance(a, JetCoord) and (dep is None or a.dep == dep)]
    return sorted(js, key=lambda a: a.sort_key())


def jet_order(e: DiffExpr) -> int:
    return max((a.order for a in jet_atoms(e)), default=0)


def has_jets(e: DiffExpr) -> bool:
    return any(isinstance(a, JetCoord) for a in e.free_atoms())


def _minus_D(e: DiffExpr, K: Sequence[int]) -> DiffExpr:
    e = total_derivative_multi(e, K)
    return -e if sum(K) % 2 else e


def euler(e: DiffExpr, dep: int) -> DiffExpr:
    """Variational derivative E_{U^dep}."""
    return expr_sum(_minus_D(partial(e, a), a.multi) for a in jet_atoms(e, dep))


def higher_euler(e: DiffExpr, dep: int, s: Sequence[int]) -> DiffExpr:
    """E^{(s)}_{U^dep} = sum over K >= s of C(K, s) (-D)_{K-s} d/dU_K."""
    s = MultiIndex(s)
    out = []
    for a in jet_atoms(e, dep):
        K = a.multi
        if not s.le(K):
            continue
        w = 1
        for ki, si in zip(K, s):
            w *= comb(ki, si)
        out.append(w * _minus_D(partial(e, a), K.minus(s)))
    return expr_sum(out)


def substitute(e: DiffExpr, assignment: Mapping[int, DiffExpr]) -> DiffExpr:
    """Replace dependent variables by expressions; jets become total derivatives.

    ``assignment`` maps dependent indices to replacements.  Jets of replaced
    variables map to D_J of the replacement.
    """
    mapping: dict[Atom, DiffExpr] = {}
    cache: dict[tuple[int, MultiIndex], DiffExpr] = {}

    def jet_value(dep: int, J: MultiIndex) -> DiffExpr:
        r = cache.get((dep, J))
        if r is None:
            if J.order == 0:
                r = as_expr(assignment[dep])
            else:
                i = next(k for k, c in enumerate(J) if c)
                r = total_derivative(jet_value(dep, J.bump(i, -1)), i)
            cache[(dep, J)] = r
        return r

    for a in jet_atoms(e):
        if a.dep in assignment:
            mapping[a] = jet_value(a.dep, a.multi)
    return subs(e, mapping)


def apply_prolonged_symmetry(e: DiffExpr, eta: Sequence[DiffExpr]) -> DiffExpr:
    """sum over rho, J of (D_J eta^rho) * de/dU^rho_J."""
    out = []
    for a in jet_atoms(e):
        if a.dep < len(eta) and eta[a.dep]:
            out.append(total_derivative_multi(as_expr(eta[a.dep]), a.multi) * partial(e, a))
    return expr_sum(out)


def max_sweeps(order: int) -> int:
    env = os.environ.get("CONSLAW_MAX_SWEEPS")
    if env:
        return int(env)
    return 10 * max(1, order)


def _fmt_jet(a: JetCoord) -> str:
    return f"u{a.dep + 1}_{''.join(str(i + 1) * c for i, c in enumerate(a.multi))}"


class _Reducer:
    """Memoized normal forms of jet coordinates modulo a solved-form system."""

    def __init__(self, equations: Sequence):
        self.eqs = [(eq.leading, as_expr(eq.rhs)) for eq in equations]
        self.nf: dict[JetCoord, DiffExpr | None] = {}

    def leading_for(self, a: JetCoord):
        for lead, rhs in self.eqs:
            if lead.dep == a.dep and lead.multi.le(a.multi):
                return lead, rhs
        return None

    def normal_form(self, a: JetCoord, stack: list, limit: int) -> DiffExpr | None:
        if a in self.nf:
            return self.nf[a]
        hit = self.leading_for(a)
        if hit is None:
            self.nf[a] = None
            return None
        if a in stack or len(stack) > limit:
            chain = [_fmt_jet(b) for b in stack] + [_fmt_jet(a)]
            raise ReductionLimitExceeded(
                "reduction does not terminate; the system is not in solved form",
                chain)
        stack.append(a)
        lead, rhs = hit
        if a == lead:
            r = self.reduce(rhs, stack, limit)
        else:
            i = next(k for k, (x, y) in enumerate(zip(a.multi, lead.multi)) if x > y)
            prev = JetCoord(a.dep, a.multi.bump(i, -1))
            base = self.normal_form(prev, stack, limit)
            r = self.reduce(total_derivative(base, i), stack, limit)
        stack.pop()
        self.nf[a] = r
        return r

    def reduce(self, e: DiffExpr, stack: list, limit: int) -> DiffExpr:
        sweeps = 0
        while True:
            mapping = {}
            for a in jet_atoms(e):
                r = self.normal_form(a, stack, limit)
                if r is not None:
                    mapping[a] = r
            if not mapping:
                return e
            sweeps += 1
            if sweeps > limit:
                raise ReductionLimitExceeded(
                    "substitution sweep bound exceeded",
                    [_fmt_jet(b) for b in mapping])
            e = subs(e, mapping)


def reducer_for(sys) -> _Reducer:
    r = sys.cache.get("reducer")
    if r is None:
        r = _Reducer(sys.equations)
        sys.cache["reducer"] = r
    return r


def reduce_on_solutions(e: DiffExpr, sys) -> DiffExpr:
    """Normal form of e modulo the solved-form system (zero iff e vanishes on solutions)."""
    e = as_expr(e)
    limit = max_sweeps(jet_order(e))
    return reducer_for(sys).reduce(e, [], limit)


def lambda_powers(e: DiffExpr, lam: Atom) -> dict[int, DiffExpr]:
    """Split e by the exponent of the atom lam (top level only)."""
    lid = atom_id(lam)
    parts: dict[int, dict] = {}
    for m, c in e.terms.items():
        k = P.mono_exponent(m, lid)
        parts.setdefault(k, {})[P.mono_with(m, lid, 0) if k else m] = c
    return {k: DiffExpr(v) for k, v in parts.items()}


def multi_indices(n: int, max_order: int) -> list[MultiIndex]:
    """All multi-indices of n variables with order <= max_order (graded, deterministic)."""
    out = []
    for order in range(max_order + 1):
        for c in product(range(order + 1), repeat=n):
            if sum(c) == order:
                out.append(MultiIndex(c))
    return out
