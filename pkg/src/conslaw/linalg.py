"""Exact sparse linear algebra: fraction-free elimination over the integers.

Rows are dicts ``{column: coefficient}``.  Rational input rows are scaled to
primitive integer rows before elimination, and every combined row is made
primitive again, so intermediate growth stays small.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from . import poly as P


def primitive(row: Mapping[int, int | Fraction]) -> dict[int, int]:
    """Scale a rational row to coprime integers (sign unchanged)."""
    if not row:
        return {}
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    ints = {k: int(v * den) for k, v in row.items() if v}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {k: v // g for k, v in ints.items()}
    return ints


def echelon(rows: Iterable[Mapping[int, int | Fraction]],
            column_order: Sequence[int]) -> list[tuple[int, dict[int, int]]]:
    """Reduced row echelon form as a list of ``(pivot column, row)``.

    Pivot columns are taken in ``column_order``; within a column the pivot row
    minimizes ``|coefficient|``, then the number of nonzeros, then the row
    index.  Columns absent from ``column_order`` are never pivots.
    """
    active = [(n, r) for n, r in enumerate(primitive(r) for r in rows) if r]
    pivots: list[tuple[int, dict[int, int]]] = []
    for col in column_order:
        cands = [(abs(r[col]), len(r), n, r) for n, r in active if col in r]
        if not cands:
            continue
        _, _, pn, prow = min(cands, key=lambda t: t[:3])
        nxt = []
        for n, r in active:
            if n == pn:
                continue
            if col in r:
                r = _eliminate(r, prow, col)
                if not r:
                    continue
            nxt.append((n, r))
        active = nxt
        pivots.append((col, prow))
    # back substitution, later pivots into earlier rows
    for k in range(len(pivots) - 1, -1, -1):
        col, prow = pivots[k]
        for j in range(k):
            c2, r2 = pivots[j]
            if col in r2:
                pivots[j] = (c2, _eliminate(r2, prow, col))
    for k, (col, prow) in enumerate(pivots):
        if prow[col] < 0:
            pivots[k] = (col, {c: -v for c, v in prow.items()})
    return pivots + [(-1, r) for _, r in active]


def _eliminate(r: dict[int, int], prow: dict[int, int], col: int) -> dict[int, int]:
    a, b = prow[col], r[col]
    g = gcd(a, b)
    return primitive(P.row_combine(a // g, r, b // g, prow))


def nullspace(rows: Iterable[Mapping[int, int | Fraction]], ncols: int,
              column_order: Sequence[int] | None = None) -> list[list[Fraction]]:
    """Exact basis of ``{v : row . v = 0 for all rows}``.

    One vector per free column, with that entry 1 and the other free entries
    0.  Vectors are ordered by free column index.  Columns late in
    ``column_order`` tend to be free, so listing low-degree columns last
    keeps basis vectors anchored at simple monomials.
    """
    order = list(column_order) if column_order is not None else list(range(ncols))
    ech = echelon(rows, order)
    pivot_rows = [(c, r) for c, r in ech if c >= 0]
    pivot_cols = {c for c, _ in pivot_rows}
    free = sorted(c for c in order if c not in pivot_cols)
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for c, r in pivot_rows:
            if f in r:
                v[c] = Fraction(-r[f], r[c])
        basis.append(v)
    return basis


def rank(rows: Iterable[Mapping[int, int | Fraction]], ncols: int) -> int:
    return sum(1 for c, _ in echelon(rows, list(range(ncols))) if c >= 0)


def solve(rows: Sequence[Mapping[int, int | Fraction]], rhs: Sequence[int | Fraction],
          ncols: int, column_order: Sequence[int] | None = None) -> list[Fraction] | None:
    """A particular solution of ``A v = b`` with free variables set to zero.

    Returns ``None`` when the system is inconsistent.
    """
    order = list(column_order) if column_order is not None else list(range(ncols))
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[ncols] = b
        aug.append(row)
    ech = echelon(aug, order)
    v = [Fraction(0)] * ncols
    for c, r in ech:
        if c < 0:
            if r:
                return None
            continue
        v[c] = Fraction(r.get(ncols, 0), r[c])
    return v
