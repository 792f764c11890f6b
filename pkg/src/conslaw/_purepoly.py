"""Pure-Python sparse polynomial kernel.

A monomial is a flat tuple ``(id0, e0, id1, e1, ...)`` with atom ids strictly
increasing and nonzero integer exponents.  A polynomial is a plain ``dict``
mapping monomials to exact coefficients (``int`` or ``Fraction``); zero
coefficients are never stored.

The compiled twin in ``_fastpoly.pyx`` exposes the same functions with the
same semantics; ``conslaw.poly`` picks one at import time.
"""
from __future__ import annotations

from fractions import Fraction

BACKEND = "python"


def _c(x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la = len(a)
    lb = len(b)
    while i < la and j < lb:
        x = a[i]
        y = b[j]
        if x < y:
            out.append(x)
            out.append(a[i + 1])
            i += 2
        elif y < x:
            out.append(y)
            out.append(b[j + 1])
            j += 2
        else:
            e = a[i + 1] + b[j + 1]
            if e:
                out.append(x)
                out.append(e)
            i += 2
            j += 2
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def mono_pow(a: tuple, k: int) -> tuple:
    if k == 0:
        return ()
    return tuple(v * k if n & 1 else v for n, v in enumerate(a))


def mono_inv(a: tuple) -> tuple:
    return mono_pow(a, -1)


def mono_exponent(a: tuple, aid: int) -> int:
    for n in range(0, len(a), 2):
        if a[n] == aid:
            return a[n + 1]
        if a[n] > aid:
            break
    return 0


def mono_with(a: tuple, aid: int, e: int) -> tuple:
    """Return ``a`` with the exponent of ``aid`` replaced by ``e``."""
    out = []
    placed = False
    for n in range(0, len(a), 2):
        x = a[n]
        if x == aid:
            if e:
                out.append(x)
                out.append(e)
            placed = True
        else:
            if not placed and x > aid:
                if e:
                    out.append(aid)
                    out.append(e)
                placed = True
            out.append(x)
            out.append(a[n + 1])
    if not placed and e:
        out.append(aid)
        out.append(e)
    return tuple(out)


def poly_add(p: dict, q: dict) -> dict:
    if len(p) < len(q):
        p, q = q, p
    out = dict(p)
    for m, c in q.items():
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            v = _c(v + c)
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def poly_sub(p: dict, q: dict) -> dict:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m)
        if v is None:
            out[m] = -c
        else:
            v = _c(v - c)
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def poly_scale(p: dict, c) -> dict:
    if not c:
        return {}
    if c == 1:
        return dict(p)
    return {m: _c(v * c) for m, v in p.items()}


def poly_iadd_term(acc: dict, p: dict, mono: tuple, c) -> None:
    """In place: ``acc += c * mono * p``."""
    if not c:
        return
    for m, v in p.items():
        mm = mono_mul(m, mono)
        w = _c(v * c)
        old = acc.get(mm)
        if old is None:
            acc[mm] = w
        else:
            w = _c(old + w)
            if w:
                acc[mm] = w
            else:
                del acc[mm]


def poly_mul_term(p: dict, mono: tuple, c) -> dict:
    acc: dict = {}
    poly_iadd_term(acc, p, mono, c)
    return acc


def poly_mul(p: dict, q: dict) -> dict:
    if len(p) < len(q):
        p, q = q, p
    acc: dict = {}
    for m, c in q.items():
        poly_iadd_term(acc, p, m, c)
    return acc


def row_combine(a, ra: dict, b, rb: dict) -> dict:
    """Sparse integer rows: return ``a*ra - b*rb`` (zeros dropped)."""
    out = {k: a * v for k, v in ra.items()}
    for k, v in rb.items():
        w = out.get(k, 0) - b * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out
