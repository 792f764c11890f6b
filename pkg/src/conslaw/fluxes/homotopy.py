"""Flux reconstruction by the two homotopy formulas."""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .. import poly as P
from ..calculus import (
    divergence,
    has_jets,
    higher_euler,
    jet_atoms,
    substitute,
    total_derivative_multi,
)
from ..errors import (
    ArbitraryFunctionPresent,
    DivergentIntegral,
    ExpressionError,
    NonPolynomialLambda,
    NonvanishingAtZero,
    UnsupportedBasePoint,
    VerificationError,
)
from ..expr import (
    ZERO,
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
    subs,
)
from ..multipliers import MultiplierSet, characteristic_form
from ..problem import PDESystem, has_arbitrary
from ..render import render
from .bilinear import bilinear_S
from .law import CHARACTERISTIC, ConservationLaw

LAMBDA = Param("lambda")


def homotopy1_integrand(f: DiffExpr, i: int, m: int | None = None) -> DiffExpr:
    """sum_j I_j^{(x^i)}(f), before the scaling U -> lambda U."""
    js = jet_atoms(f)
    deps = sorted({a.dep for a in js}) if m is None else range(m)
    out = []
    for j in deps:
        orders = [a.multi for a in js if a.dep == j]
        if not orders:
            continue
        n = len(orders[0])
        top = [max(K[k] for K in orders) for k in range(n)]
        ranges = [range(top[k] + 1) for k in range(n)]
        for s in product(*ranges):
            s = MultiIndex(s)
            if s[i] + 1 > top[i]:
                continue
            E = higher_euler(f, j, s.bump(i))
            if not E:
                continue
            w = Fraction(1 + s[i], 1 + s.order)
            out.append(w * total_derivative_multi(atom_jet(j, n) * E, s))
    return expr_sum(out)


def atom_jet(dep: int, n: int) -> DiffExpr:
    return jet(dep, (0,) * n)


def _lambda_free(e: DiffExpr) -> bool:
    for a in e.free_atoms():
        if isinstance(a, FunctionAtom) and any(LAMBDA in g.free_atoms() for g in a.args):
            return False
    return True


def extract_lambda(e: DiffExpr) -> DiffExpr:
    """Pull lambda out of function arguments using declared homogeneity.

    f(lambda^k a) = lambda^(h k) f(a) for a defined function of homogeneity h.
    Anything else leaves lambda inside a function and is rejected.
    """
    lid = atom_id(LAMBDA)
    mapping = {}
    for a in e.atoms():
        if not isinstance(a, FunctionAtom):
            continue
        if not any(LAMBDA in g.free_atoms() for g in a.args):
            continue
        ks = set()
        new_args = []
        for g in a.args:
            powers = {P.mono_exponent(mm, lid) for mm in g.terms}
            if len(powers) != 1:
                raise NonPolynomialLambda(
                    f"argument of {a.name} is not homogeneous in lambda")
            (k,) = powers
            ks.add(k)
            g0 = DiffExpr({P.mono_with(mm, lid, 0): c for mm, c in g.terms.items()})
            if LAMBDA in g0.free_atoms():
                raise NonPolynomialLambda(f"lambda is nested inside {a.name}")
            new_args.append(g0)
        h = a.decl.homogeneity
        if len(ks) != 1 or h is None or a.kind != "defined":
            raise NonPolynomialLambda(
                f"{a.name} has no declared homogeneity; lambda cannot be extracted")
        (k,) = ks
        w = h * k
        if w.denominator != 1:
            raise NonPolynomialLambda(f"{a.name} yields a fractional power of lambda")
        mapping[a] = atom(LAMBDA) ** int(w) * func(a.decl, new_args, a.deriv)
    return subs(e, mapping) if mapping else e


def integrate_lambda(e: DiffExpr, divide: bool = False) -> DiffExpr:
    """Term-by-term integral over lambda in [0, 1] (of e / lambda when ``divide``)."""
    e = extract_lambda(e)
    if not _lambda_free(e):
        raise NonPolynomialLambda("lambda remains inside a function argument")
    lid = atom_id(LAMBDA)
    acc: dict = {}
    for mm, c in e.terms.items():
        p = P.mono_exponent(mm, lid) - (1 if divide else 0)
        if p < 0:
            raise DivergentIntegral(
                f"the lambda integrand contains lambda^{p}; the integral over [0, 1] diverges")
        rest = P.mono_with(mm, lid, 0)
        P.poly_iadd_term(acc, {rest: c}, (), Fraction(1, p + 1))
    return DiffExpr._from(acc, True)


def _check_no_arbitrary(exprs: Sequence[DiffExpr], method: str) -> None:
    for e in exprs:
        if has_arbitrary(e):
            raise ArbitraryFunctionPresent(
                f"{method} cannot integrate expressions with arbitrary functions; "
                "use the direct or scaling method")


def flux_homotopy1(f: DiffExpr, n: int, m: int) -> tuple[DiffExpr, ...]:
    """Invert the total divergence f = D_i Phi^i with the first homotopy formula.

    Requires f[0] = 0 and no arbitrary-function atoms.  Raises when the lambda
    integral diverges.
    """
    f = as_expr(f)
    _check_no_arbitrary([f], "the first homotopy formula")
    for mm in f.terms:
        if not any(_is_jetful(mm[k]) for k in range(0, len(mm), 2)):
            raise NonvanishingAtZero(
                "f does not vanish at U = 0; the first homotopy formula needs f[0] = 0")
    lam = atom(LAMBDA)
    scale = {j: lam * atom_jet(j, n) for j in range(m)}
    out = []
    for i in range(n):
        I = homotopy1_integrand(f, i, m)
        out.append(integrate_lambda(substitute(I, scale), divide=True))
    return tuple(out)


def _is_jetful(aid: int) -> bool:
    a = atom_of(aid)
    if isinstance(a, JetCoord):
        return True
    if isinstance(a, FunctionAtom):
        return any(has_jets(g) for g in a.args)
    return False


def law_homotopy1(sys: PDESystem, lam: MultiplierSet) -> ConservationLaw:
    f = characteristic_form(sys, lam.multipliers)
    fluxes = flux_homotopy1(f, sys.n, sys.m)
    residual = f - divergence(fluxes)
    if not residual.is_zero():
        raise VerificationError("homotopy fluxes fail the characteristic identity",
                                render(residual, sys.names))
    return ConservationLaw(fluxes, "homotopy1", lam, CHARACTERISTIC)


def check_base_point(sys: PDESystem, base: Mapping[int, DiffExpr]) -> dict[int, DiffExpr]:
    out = {}
    for j in range(sys.m):
        e = as_expr(base.get(j, ZERO))
        if any(not isinstance(a, IndependentVar) for a in e.free_atoms()):
            raise UnsupportedBasePoint(
                "base point components must be expressions in the independent variables only")
        out[j] = e
    return out


def base_point_fluxes(sys: PDESystem, lam: Sequence[DiffExpr],
                      base: Mapping[int, DiffExpr]) -> tuple[DiffExpr, ...]:
    """(integral of F dx^1, 0, ..., 0) with F = Lambda[U~] R[U~]."""
    base = check_base_point(sys, base)
    try:
        F = expr_sum(substitute(l, base) * substitute(r, base) for l, r in zip(lam, sys.R))
    except (ExpressionError, ZeroDivisionError) as exc:
        raise UnsupportedBasePoint(f"multipliers or equations are singular at the base point: {exc}")
    acc: dict = {}
    x1 = atom_id(IndependentVar(0))
    for mm, c in F.terms.items():
        for k in range(0, len(mm), 2):
            if not isinstance(atom_of(mm[k]), IndependentVar) or mm[k + 1] < 0:
                raise UnsupportedBasePoint(
                    "Lambda R at the base point is not a polynomial in the independent variables")
        e = P.mono_exponent(mm, x1)
        P.poly_iadd_term(acc, {P.mono_with(mm, x1, e + 1): c}, (), Fraction(1, e + 1))
    return (DiffExpr(acc),) + (ZERO,) * (sys.n - 1)


def flux_homotopy2(sys: PDESystem, lam: Sequence[DiffExpr],
                   base: Mapping[int, DiffExpr] | None = None) -> tuple[DiffExpr, ...]:
    """Second homotopy formula along U_lambda = lambda U + (1 - lambda) U~."""
    lam = tuple(as_expr(l) for l in lam)
    R = sys.R
    _check_no_arbitrary(list(lam) + list(R), "the second homotopy formula")
    base = check_base_point(sys, base or {})
    try:
        return _homotopy2(sys, lam, base)
    except DivergentIntegral as exc:
        if any(base.values()):
            raise
        hint = ", ".join(f"{d} = {sys.independents[0]}" for d in sys.dependents)
        raise DivergentIntegral(f"{exc}; try a nonzero base point such as {hint}") from None


def _homotopy2(sys: PDESystem, lam: tuple[DiffExpr, ...],
               base: dict[int, DiffExpr]) -> tuple[DiffExpr, ...]:
    R = sys.R
    L = atom(LAMBDA)
    U = {j: atom_jet(j, sys.n) for j in range(sys.m)}
    path = {j: L * U[j] + (1 - L) * base[j] for j in range(sys.m)}
    V = tuple(U[j] - base[j] for j in range(sys.m))
    try:
        lam_path = tuple(substitute(l, path) for l in lam)
        R_path = tuple(substitute(r, path) for r in R)
    except (ExpressionError, ZeroDivisionError) as exc:
        raise DivergentIntegral(f"the integrand is singular along the homotopy path: {exc}")
    lam_path = tuple(extract_lambda(e) for e in lam_path)
    R_path = tuple(extract_lambda(e) for e in R_path)
    out = []
    for i in range(sys.n):
        integrand = bilinear_S(V, lam_path, R, i, at=path) + bilinear_S(V, R_path, lam, i, at=path)
        out.append(integrate_lambda(integrand))
    b = base_point_fluxes(sys, lam, base)
    return tuple(p + q for p, q in zip(b, out))


def law_homotopy2(sys: PDESystem, lam: MultiplierSet,
                  base: Mapping[int, DiffExpr] | None = None) -> ConservationLaw:
    fluxes = flux_homotopy2(sys, lam.multipliers, base)
    f = characteristic_form(sys, lam.multipliers)
    residual = f - divergence(fluxes)
    if not residual.is_zero():
        raise VerificationError("homotopy fluxes fail the characteristic identity",
                                render(residual, sys.names))
    notes = ()
    if base and any(as_expr(v) for v in base.values()):
        notes = tuple(f"base point {sys.dependents[j]} = {render(as_expr(v), sys.names)}"
                      for j, v in sorted(base.items()))
    return ConservationLaw(fluxes, "homotopy2", lam, CHARACTERISTIC, assumptions=notes)
