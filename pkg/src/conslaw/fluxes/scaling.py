"""Fluxes from a scaling symmetry, and from a symmetry / adjoint-symmetry pair."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..calculus import divergence, reduce_on_solutions
from ..errors import CriticalConservationLaw, NonHomogeneous, VerificationError
from ..expr import (
    Atom,
    DiffExpr,
    FunctionAtom,
    IndependentVar,
    JetCoord,
    Param,
    as_expr,
    atom_of,
    jet,
    var,
)
from ..multipliers import MultiplierSet
from ..problem import PDESystem
from ..render import render
from .bilinear import bilinear_S
from .law import ON_SOLUTIONS, ConservationLaw


@dataclass(frozen=True)
class ScalingSymmetry:
    """x^i -> e^(eps p_i) x^i, U^rho -> e^(eps q_rho) U^rho."""

    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(Fraction(v) for v in self.p))
        object.__setattr__(self, "q", tuple(Fraction(v) for v in self.q))

    def eta(self) -> tuple[DiffExpr, ...]:
        """Evolutionary characteristic q U - p^i x^i U_i, one per dependent variable."""
        n = len(self.p)
        out = []
        for rho, q in enumerate(self.q):
            e = q * jet(rho, (0,) * n)
            for i, p in enumerate(self.p):
                if p:
                    e = e - p * var(i) * jet(rho, tuple(int(k == i) for k in range(n)))
            out.append(e)
        return tuple(out)

    def characteristic(self) -> tuple[DiffExpr, ...]:
        """-eta, the first argument of S in ``flux_scaling``."""
        return tuple(-e for e in self.eta())


@dataclass(frozen=True)
class WeightReport:
    r: tuple[Fraction, ...]
    s: tuple[Fraction | None, ...]
    chi: tuple[Fraction | None, ...]

    @property
    def critical(self) -> tuple[int, ...]:
        return tuple(k for k, c in enumerate(self.chi) if c == 0)

    def as_dict(self) -> dict:
        f = lambda v: None if v is None else str(v)  # noqa: E731
        return {"r": [f(v) for v in self.r], "s": [f(v) for v in self.s],
                "chi": [f(v) for v in self.chi]}


def atom_weight(a: Atom, sym: ScalingSymmetry) -> Fraction:
    if isinstance(a, IndependentVar):
        return sym.p[a.index]
    if isinstance(a, JetCoord):
        return sym.q[a.dep] - sum(c * sym.p[i] for i, c in enumerate(a.multi))
    if isinstance(a, Param):
        return Fraction(0)
    assert isinstance(a, FunctionAtom)
    ws = [weight(g, sym) for g in a.args]
    if a.kind == "defined" and a.decl.homogeneity is not None and len(set(ws)) == 1:
        return a.decl.homogeneity * ws[0]
    if all(w == 0 for w in ws):
        return Fraction(0)
    raise NonHomogeneous(
        f"{a.name} has arguments of nonzero scaling weight and no declared homogeneity")


def term_weight(mono: tuple, sym: ScalingSymmetry) -> Fraction:
    return sum((atom_weight(atom_of(mono[k]), sym) * mono[k + 1]
                for k in range(0, len(mono), 2)), Fraction(0))


def weight(e: DiffExpr, sym: ScalingSymmetry) -> Fraction:
    """The common scaling weight of every term; raises if terms disagree."""
    e = as_expr(e)
    seen = None
    for mm in e.terms:
        w = term_weight(mm, sym)
        if seen is None:
            seen = (w, mm)
        elif w != seen[0]:
            raise NonHomogeneous(
                f"terms of weights {seen[0]} and {w} are mixed", (seen[1], mm))
    return Fraction(0) if seen is None else seen[0]


def scaling_weights(sys: PDESystem, lam: Sequence[DiffExpr], sym: ScalingSymmetry) -> WeightReport:
    """r per equation, s per multiplier (None for Lambda = 0) and chi = s + r + sum p."""
    if len(sym.p) != sys.n or len(sym.q) != sys.m:
        raise ValueError("scaling weights do not match the declared variables")
    total_p = sum(sym.p, Fraction(0))
    r = tuple(weight(R, sym) for R in sys.R)
    s = tuple(weight(l, sym) if as_expr(l) else None for l in lam)
    chi = tuple(None if sv is None else sv + rv + total_p for sv, rv in zip(s, r))
    return WeightReport(r, s, chi)


def pair_fluxes(sys: PDESystem, eta: Sequence[DiffExpr], omega: Sequence[DiffExpr]) -> tuple[DiffExpr, ...]:
    return tuple(bilinear_S(eta, omega, sys.R, i) for i in range(sys.n))


def _verify_on_solutions(sys: PDESystem, fluxes: Sequence[DiffExpr]) -> DiffExpr:
    return reduce_on_solutions(divergence(fluxes), sys)


def flux_scaling(sys: PDESystem, lam: MultiplierSet, sym: ScalingSymmetry,
                 strict: bool = False) -> ConservationLaw:
    """Fluxes S^i[V, Lambda; R] with V = -eta, the characteristic of the scaling.

    The sign is the one that makes the density of the KdV law with multiplier U
    equal to (2U + 3tU_t + xU_x)U; the divergence of the result is chi Lambda R
    up to a trivial divergence, with chi taken with the opposite sign.  A
    critical pair (chi = 0) still produces output, flagged as trivial; with
    ``strict`` it raises instead.
    """
    report = scaling_weights(sys, lam.multipliers, sym)
    V = sym.characteristic()
    fluxes = pair_fluxes(sys, V, lam.multipliers)
    residual = _verify_on_solutions(sys, fluxes)
    if not residual.is_zero():
        raise VerificationError("scaling fluxes do not vanish on solutions",
                                render(residual, sys.names))
    diags = []
    if report.critical:
        msg = ("critical with respect to this scaling (chi = 0 for equation "
               + ", ".join(str(k + 1) for k in report.critical)
               + "); the formula yields a trivial conservation law")
        if strict:
            raise CriticalConservationLaw(msg)
        diags.append(msg)
    from ..verify import triviality_heuristic
    law = ConservationLaw(fluxes, "scaling", lam, ON_SOLUTIONS,
                          diagnostics=tuple(diags), weights=report)
    triv = triviality_heuristic(sys, law)
    return law.with_(triviality=triv)


def flux_symmetry_pair(sys: PDESystem, eta: Sequence[DiffExpr],
                       omega: Sequence[DiffExpr]) -> ConservationLaw:
    """Fluxes S^i[eta, omega; R] from a symmetry characteristic and an adjoint symmetry."""
    eta = tuple(as_expr(e) for e in eta)
    omega = tuple(as_expr(w) for w in omega)
    fluxes = pair_fluxes(sys, eta, omega)
    residual = _verify_on_solutions(sys, fluxes)
    if not residual.is_zero():
        raise VerificationError(
            "pair fluxes do not vanish on solutions; the inputs are not a "
            "symmetry / adjoint-symmetry pair", render(residual, sys.names))
    from ..verify import triviality_heuristic
    law = ConservationLaw(fluxes, "pair", MultiplierSet(omega, ("pair", ())), ON_SOLUTIONS)
    return law.with_(triviality=triviality_heuristic(sys, law))
