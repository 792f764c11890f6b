"""Random expression generators for the property tests."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from hypothesis import strategies as st

from conslaw.calculus import jet_atoms, partial, total_derivative_multi
from conslaw.expr import (
    DiffExpr,
    FunctionDecl,
    JetCoord,
    MultiIndex,
    as_expr,
    expr_sum,
    func,
    jet,
    var,
)
from conslaw.render import Names


@dataclass
class SystemNames:
    independents: tuple[str, ...] = ("t", "x")
    dependents: tuple[str, ...] = ("u", "v")
    functions: dict = field(default_factory=dict)

    @property
    def names(self) -> Names:
        return Names(self.independents, self.dependents)


def random_system_names() -> SystemNames:
    f = FunctionDecl("f", 1)
    H = FunctionDecl("H", 2)
    return SystemNames(functions={"f": f, "H": H})


def _coef(rng: random.Random) -> Fraction:
    c = Fraction(rng.randint(-6, 6), rng.choice([1, 1, 1, 2, 3]))
    return c or Fraction(1)


def _jet(rng: random.Random, n: int, m: int, max_order: int) -> DiffExpr:
    counts = [0] * n
    for _ in range(rng.randint(0, max_order)):
        counts[rng.randrange(n)] += 1
    return jet(rng.randrange(m), counts)


def _small_poly(rng: random.Random, n: int, m: int) -> DiffExpr:
    terms = []
    for _ in range(rng.randint(1, 2)):
        t = as_expr(_coef(rng))
        for _ in range(rng.randint(1, 2)):
            t = t * (var(rng.randrange(n)) if rng.random() < 0.3 else _jet(rng, n, m, 1))
        terms.append(t)
    return expr_sum(terms)


def _function_atom(rng: random.Random, n: int, m: int, functions) -> DiffExpr:
    decl = functions[rng.choice(sorted(functions))]
    args = [_small_poly(rng, n, m) for _ in range(decl.arity)]
    deriv = [rng.randint(0, 2) for _ in range(decl.arity)]
    return func(decl, args, deriv)


def random_expr(rng: random.Random, n: int, m: int, max_order: int = 2, jet_free_terms: bool = True,
                functions=None, negative: bool = False) -> DiffExpr:
    """A sum of up to four random monomials in x^i, jets and optional function atoms.

    With ``jet_free_terms=False`` every term carries a jet factor, so the
    expression vanishes at U = 0.
    """
    terms = []
    for _ in range(rng.randint(1, 4)):
        t = as_expr(_coef(rng))
        if not jet_free_terms:
            t = t * _jet(rng, n, m, max_order)
        for _ in range(rng.randint(0, 3)):
            r = rng.random()
            if functions and r < 0.15:
                t = t * _function_atom(rng, n, m, functions)
            elif r < 0.35:
                t = t * var(rng.randrange(n)) ** rng.randint(1, 2)
            else:
                k = rng.randint(1, 2)
                if negative and rng.random() < 0.2:
                    k = -k
                t = t * _jet(rng, n, m, max_order) ** k
        terms.append(t)
    return expr_sum(terms)


def random_triple(rng: random.Random, n: int, m: int):
    """(V, W, F): m-component V, and W, F with one component per equation (N = m)."""
    V = tuple(random_expr(rng, n, m, max_order=1) for _ in range(m))
    W = tuple(random_expr(rng, n, m, max_order=1) for _ in range(m))
    F = tuple(random_expr(rng, n, m, max_order=2, jet_free_terms=False) for _ in range(m))
    return V, W, F


def _jets_of(F: Sequence[DiffExpr]) -> list[JetCoord]:
    seen = {}
    for f in F:
        for a in jet_atoms(f):
            seen[a] = None
    return sorted(seen, key=lambda a: a.sort_key())


def linearization(F: Sequence[DiffExpr], V: Sequence[DiffExpr]) -> list[DiffExpr]:
    """L_F[V]^sigma = sum over rho, J of dF^sigma/dU^rho_J D_J V^rho."""
    js = _jets_of(F)
    return [expr_sum(partial(f, a) * total_derivative_multi(V[a.dep], a.multi) for a in js) for f in F]


def adjoint_linearization(F: Sequence[DiffExpr], W: Sequence[DiffExpr], m: int) -> list[DiffExpr]:
    """L*_F[W]_rho = sum over sigma, J of (-D)_J (W_sigma dF^sigma/dU^rho_J)."""
    js = _jets_of(F)
    out = []
    for rho in range(m):
        acc = []
        for a in js:
            if a.dep != rho:
                continue
            sign = -1 if a.multi.order % 2 else 1
            inner = expr_sum(w * partial(f, a) for w, f in zip(W, F))
            acc.append(sign * total_derivative_multi(inner, MultiIndex(a.multi)))
        out.append(expr_sum(acc))
    return out


def bilinear_lhs(V, W, F, n: int) -> DiffExpr:
    """W . L_F[V] - V . L*_F[W]."""
    LV = linearization(F, V)
    LsW = adjoint_linearization(F, W, len(V))
    return expr_sum(w * lv for w, lv in zip(W, LV)) - expr_sum(v * lw for v, lw in zip(V, LsW))


# hypothesis wrappers around the seeded generators

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def expressions(draw, n: int = 2, m: int = 2, **kw):
    return random_expr(random.Random(draw(seeds)), n, m, **kw)
