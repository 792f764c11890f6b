"""Multiplier search by the direct method.

The determining equations E_{U^j}(sum_sigma Lambda_sigma R^sigma) = 0 are
linear in the ansatz coefficients; splitting them over the jet-space
monomials gives a homogeneous linear system whose nullspace is the space of
multipliers within the ansatz.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .calculus import euler
from .errors import NonlinearUnknowns, VerificationError
from .expr import (
    DiffExpr,
    Param,
    atom,
    atom_id,
    clear_denominators,
    coefficient_split,
    expr_sum,
    monomial_expr,
    monomial_key,
)
from .linalg import nullspace
from .problem import MultiplierAnsatz, PDESystem
from .render import Names, render


@dataclass
class LinearSystem:
    rows: list[dict[int, int | Fraction]]
    rhs: list[int | Fraction]
    provenance: list[tuple[int, DiffExpr]]
    ncols: int
    assumptions: list[DiffExpr] = field(default_factory=list)

    def is_homogeneous(self) -> bool:
        return not any(self.rhs)


@dataclass(frozen=True)
class MultiplierSet:
    multipliers: tuple[DiffExpr, ...]
    origin: tuple[str, tuple[Fraction, ...]] = ("user", ())

    def __iter__(self):
        return iter(self.multipliers)

    def __len__(self) -> int:
        return len(self.multipliers)

    def __getitem__(self, k: int) -> DiffExpr:
        return self.multipliers[k]

    def scaled(self, c) -> "MultiplierSet":
        return MultiplierSet(tuple(c * m for m in self.multipliers), self.origin)

    def render(self, names: Names) -> list[str]:
        return [render(m, names) for m in self.multipliers]


def characteristic_form(sys: PDESystem, lam: Sequence[DiffExpr]) -> DiffExpr:
    """sum_sigma Lambda_sigma R^sigma."""
    return expr_sum(l * r for l, r in zip(lam, sys.R))


def determining_equations(sys: PDESystem, ansatz: MultiplierAnsatz) -> tuple[DiffExpr, ...]:
    """E_{U^j} of the characteristic form, one per dependent variable.

    Linearity is used: the Euler operator is applied to every basis monomial
    times its equation and the results are combined with the unknowns.
    """
    cols = _column_euler(sys, ansatz)
    out = []
    for j in range(sys.m):
        out.append(expr_sum(atom(c) * cols[k][j]
                            for k, c in enumerate(_flat_unknowns(ansatz))))
    return tuple(out)


def _flat_unknowns(ansatz: MultiplierAnsatz) -> list[Param]:
    return [c for cs in ansatz.unknowns for c in cs]


def _column_euler(sys: PDESystem, ansatz: MultiplierAnsatz) -> list[tuple[DiffExpr, ...]]:
    R = sys.R
    cols = []
    for s, k in ansatz.columns():
        f = ansatz.bases[s][k] * R[s]
        cols.append(tuple(euler(f, j) for j in range(sys.m)))
    return cols


def split_linear_system(eqs: Sequence[DiffExpr], unknowns: Sequence[Param]) -> LinearSystem:
    """One row per (equation, jet-space monomial); terms free of unknowns go to the rhs."""
    index = {atom_id(c): k for k, c in enumerate(unknowns)}
    ids = set(index)
    rows: list[dict] = []
    rhs: list = []
    prov: list[tuple[int, DiffExpr]] = []
    assumptions: list[DiffExpr] = []
    for q, e in enumerate(eqs):
        cleared, mult = clear_denominators(e)
        if not mult.is_const() and mult not in assumptions:
            assumptions.append(mult)
        try:
            groups = coefficient_split(cleared, ids)
        except ValueError as exc:
            raise NonlinearUnknowns(str(exc)) from None
        for mono in sorted(groups, key=monomial_key):
            g = groups[mono]
            row = {index[u]: c for u, c in g.items() if u is not None and c}
            b = -g.get(None, 0)
            if not row and not b:
                continue
            rows.append(row)
            rhs.append(b)
            prov.append((q, monomial_expr(mono)))
    return LinearSystem(rows, rhs, prov, len(unknowns), assumptions)


def column_order_by_degree(bases: Sequence[DiffExpr], descending: bool = True) -> list[int]:
    """Column order by total degree of each basis monomial, ties by index."""
    def deg(e: DiffExpr) -> int:
        (m,) = e.terms
        return sum(m[n + 1] for n in range(0, len(m), 2))
    sign = -1 if descending else 1
    return sorted(range(len(bases)), key=lambda k: (sign * deg(bases[k]), k))


def verify_multiplier(sys: PDESystem, lam: Sequence[DiffExpr]) -> bool:
    f = characteristic_form(sys, lam)
    return all(euler(f, j).is_zero() for j in range(sys.m))


def solve_multipliers(sys: PDESystem, ansatz: MultiplierAnsatz) -> list[MultiplierSet]:
    """Basis of the multiplier space within the ansatz, each set re-verified."""
    cols = _column_euler(sys, ansatz)
    unknowns = _flat_unknowns(ansatz)
    eqs = [expr_sum(atom(c) * cols[k][j] for k, c in enumerate(unknowns))
           for j in range(sys.m)]
    lin = split_linear_system(eqs, unknowns)
    flat_bases = [b for bs in ansatz.bases for b in bs]
    basis = nullspace(lin.rows, lin.ncols, column_order_by_degree(flat_bases))
    out = []
    for v in basis:
        lam = []
        k = 0
        for bs in ansatz.bases:
            lam.append(expr_sum(v[k + i] * b for i, b in enumerate(bs) if v[k + i]))
            k += len(bs)
        if not verify_multiplier(sys, lam):
            raise VerificationError("multiplier failed re-verification",
                                    tuple(render(x, sys.names) for x in lam))
        out.append(MultiplierSet(tuple(lam), (ansatz.ansatz_id, tuple(v))))
    return out
