"""Canonical exact expressions over jet space.

An expression is a finite sum of rational multiples of atom power products
(Laurent monomials).  Atoms are independent variables, jet coordinates
``U^mu_J``, scalar parameters (``lambda``, unknown coefficients, rule
placeholders ``#k``) and function atoms ``f(args)``.  Atoms are interned to
small integer ids; the id order fixes the in-process layout of monomials,
while printing and serialization use ``Atom.sort_key`` so output never
depends on creation order.

Indices are 0-based throughout the Python API.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from . import poly as P
from .errors import NestedFunctionError, NonMonomialDivisor


class MultiIndex(tuple):
    """Derivative counts per independent variable (mixed partials commute)."""

    __slots__ = ()

    def __new__(cls, counts: Iterable[int] = ()):
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"negative derivative count in {counts}")
        return super().__new__(cls, counts)

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int, k: int = 1) -> "MultiIndex":
        c = [0] * n
        c[i] = k
        return cls(c)

    @property
    def order(self) -> int:
        return sum(self)

    @property
    def counts(self) -> dict[int, int]:
        return {i: c for i, c in enumerate(self) if c}

    def le(self, other: "MultiIndex") -> bool:
        return len(self) == len(other) and all(a <= b for a, b in zip(self, other))

    def plus(self, other: Iterable[int]) -> "MultiIndex":
        return MultiIndex(a + b for a, b in zip(self, other))

    def minus(self, other: Iterable[int]) -> "MultiIndex":
        return MultiIndex(a - b for a, b in zip(self, other))

    def bump(self, i: int, k: int = 1) -> "MultiIndex":
        c = list(self)
        c[i] += k
        return MultiIndex(c)

    def indices(self) -> tuple[int, ...]:
        """Sorted expansion, e.g. counts (1, 2) -> (0, 1, 1)."""
        out: list[int] = []
        for i, c in enumerate(self):
            out.extend([i] * c)
        return tuple(out)


class Atom:
    __slots__ = ()

    def sort_key(self) -> tuple:
        raise NotImplementedError


@dataclass(frozen=True, slots=True)
class IndependentVar(Atom):
    index: int

    def sort_key(self) -> tuple:
        return (0, self.index)


@dataclass(frozen=True, slots=True)
class JetCoord(Atom):
    dep: int
    multi: MultiIndex

    @property
    def order(self) -> int:
        return self.multi.order

    def sort_key(self) -> tuple:
        return (1, self.dep, self.multi.order, tuple(-c for c in self.multi))


@dataclass(frozen=True, slots=True)
class Param(Atom):
    name: str

    def sort_key(self) -> tuple:
        return (2, self.name)


class FunctionDecl:
    """A declared function symbol.

    ``kind="arbitrary"`` symbols are algebraically independent; their
    derivatives are new atoms marked with per-slot derivative counts.
    ``kind="defined"`` symbols carry one derivative rule per argument slot,
    written in placeholders ``#1..#k`` (and possibly the symbol itself), an
    optional power rule ``f(#)^k -> expr`` and an optional homogeneity degree
    (``f(mu^w a) = mu^(h w) f(a)``), used for scaling weights and for pulling
    the homotopy parameter out of the arguments.
    """

    def __init__(self, name: str, arity: int, kind: str = "arbitrary",
                 homogeneity: Fraction | None = None):
        if kind not in ("arbitrary", "defined"):
            raise ValueError(f"unknown function kind {kind!r}")
        if arity < 1:
            raise ValueError("function arity must be positive")
        self.name = name
        self.arity = arity
        self.kind = kind
        self.homogeneity = None if homogeneity is None else Fraction(homogeneity)
        self.derivatives: tuple[DiffExpr, ...] | None = None
        self.power_rule: tuple[int, DiffExpr] | None = None

    def define(self, derivatives: Iterable["DiffExpr"],
               power_rule: tuple[int, "DiffExpr"] | None = None) -> "FunctionDecl":
        derivatives = tuple(derivatives)
        if self.kind != "defined":
            raise ValueError(f"{self.name} is arbitrary; it has no rules")
        if len(derivatives) != self.arity:
            raise ValueError(f"{self.name} needs {self.arity} derivative rules")
        self.derivatives = derivatives
        if power_rule is not None:
            k, value = power_rule
            if int(k) < 2:
                raise ValueError("power rule exponent must be at least 2")
            self.power_rule = (int(k), value)
            _register_ruled(self)
        return self

    @staticmethod
    def placeholder(k: int) -> "DiffExpr":
        return atom(Param(f"#{k + 1}"))

    def __call__(self, *args) -> "DiffExpr":
        return func(self, args)

    def __repr__(self) -> str:
        return f"FunctionDecl({self.name!r}, {self.arity}, {self.kind!r})"


@dataclass(frozen=True, slots=True)
class FunctionAtom(Atom):
    name: str
    args: tuple
    deriv: tuple
    decl: FunctionDecl = field(compare=False, hash=False, repr=False)

    @property
    def kind(self) -> str:
        return self.decl.kind

    def sort_key(self) -> tuple:
        return (3, self.name, self.deriv, tuple(canonical_key(a) for a in self.args))


# ---------------------------------------------------------------- interning

_lock = threading.Lock()
_ids: dict[Atom, int] = {}
_atoms: list[Atom] = []
_keys: list[tuple | None] = []
_ruled_ids: set[int] = set()


def atom_id(a: Atom) -> int:
    i = _ids.get(a)
    if i is not None:
        return i
    with _lock:
        i = _ids.get(a)
        if i is None:
            i = len(_atoms)
            _atoms.append(a)
            _keys.append(None)
            _ids[a] = i
            if isinstance(a, FunctionAtom) and a.decl.power_rule is not None:
                _ruled_ids.add(i)
    return i


def atom_of(i: int) -> Atom:
    return _atoms[i]


def atom_key(i: int) -> tuple:
    k = _keys[i]
    if k is None:
        k = _atoms[i].sort_key()
        _keys[i] = k
    return k


def _register_ruled(decl: FunctionDecl) -> None:
    with _lock:
        for i, a in enumerate(_atoms):
            if isinstance(a, FunctionAtom) and a.decl is decl:
                _ruled_ids.add(i)


# ---------------------------------------------------------------- expressions

def _coef(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return _coef(Fraction(x.numerator, x.denominator))
    raise TypeError(f"inexact coefficient {x!r}")


class DiffExpr:
    """Immutable canonical expression.  Use the module constructors."""

    __slots__ = ("_t", "_h", "_ruled")

    def __init__(self, terms: dict | None = None):
        self._t = terms if terms is not None else {}
        self._h = None
        self._ruled = None

    # construction helpers
    @staticmethod
    def _from(terms: dict, rules: bool = False) -> "DiffExpr":
        e = DiffExpr(terms)
        if rules and e.has_ruled_atoms():
            e = DiffExpr(_apply_power_rules(terms))
        return e

    @property
    def terms(self) -> Mapping[tuple, int | Fraction]:
        return self._t

    def has_ruled_atoms(self) -> bool:
        if self._ruled is None:
            r = False
            if _ruled_ids:
                for m in self._t:
                    for n in range(0, len(m), 2):
                        if m[n] in _ruled_ids:
                            r = True
                            break
                    if r:
                        break
            self._ruled = r
        return self._ruled

    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def __iter__(self):
        return iter(self._t.items())

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def __eq__(self, other) -> bool:
        if isinstance(other, DiffExpr):
            return self._t == other._t
        try:
            c = _coef(other)
        except TypeError:
            return NotImplemented
        return self._t == ({(): c} if c else {})

    def __ne__(self, other) -> bool:
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    # arithmetic
    def __add__(self, other) -> "DiffExpr":
        o = as_expr(other)
        if not o._t:
            return self
        if not self._t:
            return o
        return DiffExpr(P.poly_add(self._t, o._t))

    __radd__ = __add__

    def __sub__(self, other) -> "DiffExpr":
        return DiffExpr(P.poly_sub(self._t, as_expr(other)._t))

    def __rsub__(self, other) -> "DiffExpr":
        return DiffExpr(P.poly_sub(as_expr(other)._t, self._t))

    def __neg__(self) -> "DiffExpr":
        return DiffExpr({m: -c for m, c in self._t.items()})

    def __pos__(self) -> "DiffExpr":
        return self

    def __mul__(self, other) -> "DiffExpr":
        if isinstance(other, DiffExpr):
            if len(other._t) == 1:
                (m, c), = other._t.items()
                if not m:
                    return DiffExpr(P.poly_scale(self._t, c))
            elif len(self._t) == 1:
                (m, c), = self._t.items()
                if not m:
                    return DiffExpr(P.poly_scale(other._t, c))
            rules = self.has_ruled_atoms() and other.has_ruled_atoms()
            return DiffExpr._from(P.poly_mul(self._t, other._t), rules)
        try:
            c = _coef(other)
        except TypeError:
            return NotImplemented
        return DiffExpr(P.poly_scale(self._t, c))

    __rmul__ = __mul__

    def mul_term(self, mono: tuple, c) -> "DiffExpr":
        """``c * mono * self`` for a raw monomial."""
        rules = bool(_ruled_ids) and self.has_ruled_atoms() and \
            any(mono[n] in _ruled_ids for n in range(0, len(mono), 2))
        return DiffExpr._from(P.poly_mul_term(self._t, mono, c), rules)

    def __truediv__(self, other) -> "DiffExpr":
        if isinstance(other, DiffExpr):
            if not other._t:
                raise ZeroDivisionError("division by an expression that is zero")
            if len(other._t) != 1:
                raise NonMonomialDivisor(
                    "division is supported only by single-term expressions")
            (m, c), = other._t.items()
            return self.mul_term(P.mono_inv(m), Fraction(1) / c)
        c = _coef(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return DiffExpr(P.poly_scale(self._t, _coef(Fraction(1) / Fraction(c))))

    def __rtruediv__(self, other) -> "DiffExpr":
        return as_expr(other) / self

    def __pow__(self, k: int) -> "DiffExpr":
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            if len(self._t) != 1:
                raise NonMonomialDivisor("negative power of a multi-term expression")
            (m, c), = self._t.items()
            return DiffExpr._from({P.mono_pow(m, k): _coef(Fraction(c) ** k)}, True)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # inspection
    def const_value(self):
        """The rational value if the expression is constant, else ``None``."""
        if not self._t:
            return 0
        if len(self._t) == 1 and () in self._t:
            return self._t[()]
        return None

    def is_const(self) -> bool:
        return self.const_value() is not None

    def atom_ids(self) -> set[int]:
        out: set[int] = set()
        for m in self._t:
            out.update(m[0::2])
        return out

    def atoms(self) -> set[Atom]:
        return {_atoms[i] for i in self.atom_ids()}

    def free_atoms(self) -> set[Atom]:
        """Atoms at top level and inside function arguments."""
        out: set[Atom] = set()
        for a in self.atoms():
            out.add(a)
            if isinstance(a, FunctionAtom):
                for g in a.args:
                    out |= g.free_atoms()
        return out

    def is_zero(self) -> bool:
        """Decisive zero test (clears algebraic-atom denominators first)."""
        if not self._t:
            return True
        if not self.has_ruled_atoms():
            return False
        cleared, _ = clear_denominators(self, ruled_only=True)
        return not cleared._t

    def __repr__(self) -> str:
        from .render import render
        return f"DiffExpr({render(self)!r})"


def _apply_power_rules(terms: dict) -> dict:
    out: dict = {}
    pending = list(terms.items())
    while pending:
        m, c = pending.pop()
        hit = None
        for n in range(0, len(m), 2):
            i = m[n]
            if i in _ruled_ids:
                k, _ = _atoms[i].decl.power_rule
                if m[n + 1] >= k:
                    hit = (i, m[n + 1], k)
                    break
        if hit is None:
            old = out.get(m)
            if old is None:
                out[m] = c
            else:
                v = _coef(old + c)
                if v:
                    out[m] = v
                else:
                    del out[m]
            continue
        i, e, k = hit
        q, r = divmod(e, k)
        rep = _power_value(i) ** q
        base = P.mono_with(m, i, r)
        for mm, cc in rep._t.items():
            pending.append((P.mono_mul(mm, base), _coef(cc * c)))
    return out


_power_cache: dict[int, "DiffExpr"] = {}


def _power_value(i: int) -> "DiffExpr":
    v = _power_cache.get(i)
    if v is None:
        a = _atoms[i]
        _, rule = a.decl.power_rule
        v = subs(rule, {Param(f"#{k + 1}"): g for k, g in enumerate(a.args)})
        _power_cache[i] = v
    return v


ZERO = DiffExpr({})
ONE = DiffExpr({(): 1})


def const(c) -> DiffExpr:
    c = _coef(c)
    return DiffExpr({(): c}) if c else ZERO


def atom(a: Atom) -> DiffExpr:
    e = DiffExpr({(atom_id(a), 1): 1})
    return e


def as_expr(x) -> DiffExpr:
    if isinstance(x, DiffExpr):
        return x
    if isinstance(x, Atom):
        return atom(x)
    return const(x)


def var(i: int) -> DiffExpr:
    return atom(IndependentVar(i))


def jet(dep: int, multi: Iterable[int]) -> DiffExpr:
    return atom(JetCoord(dep, MultiIndex(multi)))


def param(name: str) -> DiffExpr:
    return atom(Param(name))


def func(decl: FunctionDecl, args: Iterable, deriv: Iterable[int] | None = None) -> DiffExpr:
    args = tuple(as_expr(a) for a in args)
    if len(args) != decl.arity:
        raise ValueError(f"{decl.name} takes {decl.arity} arguments, got {len(args)}")
    for g in args:
        if any(isinstance(a, FunctionAtom) for a in g.free_atoms()):
            raise NestedFunctionError(
                f"function atoms may not be nested (argument of {decl.name})")
    d = tuple(deriv) if deriv is not None else (0,) * decl.arity
    if decl.kind == "defined" and any(d):
        raise ValueError("defined functions differentiate through their rules")
    fa = FunctionAtom(decl.name, args, d, decl)
    e = DiffExpr({(atom_id(fa), 1): 1})
    return e


def monomial_expr(mono: tuple, c=1) -> DiffExpr:
    return DiffExpr._from({mono: _coef(c)}, True) if c else ZERO


def expr_sum(items: Iterable) -> DiffExpr:
    acc: dict = {}
    for it in items:
        e = as_expr(it)
        for m, c in e._t.items():
            old = acc.get(m)
            if old is None:
                acc[m] = c
            else:
                v = _coef(old + c)
                if v:
                    acc[m] = v
                else:
                    del acc[m]
    return DiffExpr(acc)


def normalize(e: DiffExpr) -> DiffExpr:
    """Canonical form.  Expressions are kept canonical on construction, so
    this only re-applies power rules declared after ``e`` was built."""
    return DiffExpr._from(dict(e._t), True)


def canonical_key(e: DiffExpr) -> tuple:
    """Creation-order independent total key (for sorting and hashing to disk)."""
    return tuple(sorted((monomial_key(m), _frac_key(c)) for m, c in e._t.items()))


def monomial_key(m: tuple) -> tuple:
    return tuple(sorted((atom_key(m[n]), m[n + 1]) for n in range(0, len(m), 2)))


def _frac_key(c) -> tuple:
    c = Fraction(c)
    return (c.numerator, c.denominator)


def mono_atoms(m: tuple) -> list[tuple[Atom, int]]:
    return [(_atoms[m[n]], m[n + 1]) for n in range(0, len(m), 2)]


def subs(e: DiffExpr, mapping: Mapping[Atom, DiffExpr]) -> DiffExpr:
    """Replace atoms by expressions, recursing into function arguments."""
    if not mapping or not e._t:
        return e
    mp = {atom_id(a): as_expr(v) for a, v in mapping.items()}
    return _subs_ids(e, mp, {})


def _subs_ids(e: DiffExpr, mp: dict[int, DiffExpr], memo: dict) -> DiffExpr:
    repl: dict[int, DiffExpr | None] = {}
    for i in e.atom_ids():
        if i in mp:
            repl[i] = mp[i]
            continue
        a = _atoms[i]
        if isinstance(a, FunctionAtom):
            r = memo.get(i, False)
            if r is False:
                new_args = tuple(_subs_ids(g, mp, memo) for g in a.args)
                if new_args != a.args:
                    r = func(a.decl, new_args, a.deriv)
                else:
                    r = None
                memo[i] = r
            repl[i] = r
        else:
            repl[i] = None
    if all(v is None for v in repl.values()):
        return e
    powers: dict[tuple[int, int], DiffExpr] = {}
    acc: dict = {}
    for m, c in e._t.items():
        keep = []
        prod = None
        for n in range(0, len(m), 2):
            i, k = m[n], m[n + 1]
            r = repl[i]
            if r is None:
                keep.append(i)
                keep.append(k)
                continue
            pk = powers.get((i, k))
            if pk is None:
                pk = r ** k
                powers[(i, k)] = pk
            prod = pk if prod is None else prod * pk
        if prod is None:
            P.poly_iadd_term(acc, {(): 1}, tuple(keep), c)
        else:
            term = prod.mul_term(tuple(keep), c)
            for mm, cc in term._t.items():
                old = acc.get(mm)
                if old is None:
                    acc[mm] = cc
                else:
                    v = _coef(old + cc)
                    if v:
                        acc[mm] = v
                    else:
                        del acc[mm]
    return DiffExpr._from(acc, True)


def clear_denominators(e: DiffExpr, ruled_only: bool = False) -> tuple[DiffExpr, DiffExpr]:
    """Multiply by the smallest monomial making every exponent nonnegative.

    Returns ``(cleared, multiplier)``; the multiplier is assumed nonzero.  With
    ``ruled_only`` only atoms carrying a power rule are cleared, which is all
    the decisive zero test needs.
    """
    need: dict[int, int] = {}
    for m in e._t:
        for n in range(0, len(m), 2):
            if m[n + 1] < 0 and (not ruled_only or m[n] in _ruled_ids):
                need[m[n]] = max(need.get(m[n], 0), -m[n + 1])
    if not need:
        return e, ONE
    mono = []
    for i in sorted(need):
        k = need[i]
        if i in _ruled_ids:
            pk = _atoms[i].decl.power_rule[0]
            k = -(-k // pk) * pk
        mono += [i, k]
    mono = tuple(mono)
    return e.mul_term(mono, 1) if not _needs_rules(mono) else \
        DiffExpr._from(P.poly_mul_term(e._t, mono, 1), True), monomial_expr(mono)


def _needs_rules(mono: tuple) -> bool:
    return any(mono[n] in _ruled_ids for n in range(0, len(mono), 2))


def evaluate(e: DiffExpr, values: Mapping[Atom, Fraction]) -> Fraction:
    """Exact value with every top-level atom replaced by a rational."""
    total = Fraction(0)
    cache: dict[int, Fraction] = {}
    for m, c in e._t.items():
        v = Fraction(c)
        for n in range(0, len(m), 2):
            i = m[n]
            x = cache.get(i)
            if x is None:
                x = Fraction(values[_atoms[i]])
                cache[i] = x
            v *= x ** m[n + 1]
        total += v
    return total


def coefficient_split(e: DiffExpr, unknown_ids: set[int]) -> dict[tuple, dict]:
    """Group ``e`` (linear in the unknowns) by the unknown-free monomial.

    Returns ``{rest_monomial: {unknown_id or None: coefficient}}``; ``None``
    collects terms free of unknowns.  Raises ``ValueError`` when a term is
    nonlinear in the unknowns.
    """
    out: dict[tuple, dict] = {}
    for m, c in e._t.items():
        u = None
        rest = []
        for n in range(0, len(m), 2):
            i = m[n]
            if i in unknown_ids:
                if u is not None or m[n + 1] != 1:
                    raise ValueError("expression is nonlinear in the unknowns")
                u = i
            else:
                rest += [i, m[n + 1]]
        slot = out.setdefault(tuple(rest), {})
        slot[u] = _coef(slot.get(u, 0) + c)
    return out
