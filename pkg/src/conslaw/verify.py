"""Exact checks on conservation laws."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .calculus import divergence, euler, jet_atoms, reduce_on_solutions
from .expr import DiffExpr, as_expr
from .fluxes.law import ConservationLaw
from .multipliers import characteristic_form
from .problem import PDESystem
from .render import render

TRIVIAL_FIRST_KIND = "trivial-first-kind"
DIVERGENCE_FREE = "identically-divergence-free"
TRIVIAL_SUM = "trivial-sum"
TRIVIAL_DENSITY = "trivial-density"
UNKNOWN = "unknown"


@dataclass
class VerificationReport:
    checks: dict[str, bool] = field(default_factory=dict)
    residuals: dict[str, str] = field(default_factory=dict)
    assumptions: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def __bool__(self) -> bool:
        return self.passed


def verify_characteristic(sys: PDESystem, cl: ConservationLaw) -> VerificationReport:
    """sum Lambda_sigma R^sigma - D_i Phi^i == 0 identically."""
    if cl.multipliers is None:
        raise ValueError("the characteristic identity needs multipliers")
    res = characteristic_form(sys, cl.multipliers.multipliers) - divergence(cl.fluxes)
    ok = res.is_zero()
    rep = VerificationReport({"characteristic": ok}, assumptions=cl.assumptions)
    if not ok:
        rep.residuals["characteristic"] = render(res, sys.names)
    return rep


def verify_on_solutions(sys: PDESystem, cl: ConservationLaw) -> VerificationReport:
    """D_i Phi^i reduces to 0 modulo the system."""
    res = reduce_on_solutions(divergence(cl.fluxes), sys)
    ok = res.is_zero()
    rep = VerificationReport({"on-solutions": ok}, assumptions=cl.assumptions)
    if not ok:
        rep.residuals["on-solutions"] = render(res, sys.names)
    return rep


def euler_annihilation(f: DiffExpr, m: int | None = None) -> bool:
    """True iff every Euler operator annihilates f, i.e. f is a total divergence."""
    f = as_expr(f)
    deps = range(m) if m is not None else sorted({a.dep for a in jet_atoms(f)})
    return all(euler(f, j).is_zero() for j in deps)


def triviality_heuristic(sys: PDESystem, cl: ConservationLaw | Sequence[DiffExpr]) -> str:
    """Classify obviously trivial laws.

    ``trivial-first-kind``: every flux vanishes on solutions.
    ``identically-divergence-free``: D_i Phi^i == 0 in jet space.
    ``trivial-sum``: the fluxes reduced modulo the system are identically
    divergence free, so Phi is a sum of the two kinds.
    ``trivial-density``: for a first-order evolution system in x^1, the density
    reduced modulo the system is a total divergence in the other variables,
    which characterizes trivial laws of such systems.
    ``unknown`` otherwise (the law may still be trivial).
    """
    fluxes = cl.fluxes if isinstance(cl, ConservationLaw) else tuple(cl)
    reduced = [reduce_on_solutions(p, sys) for p in fluxes]
    if all(r.is_zero() for r in reduced):
        return TRIVIAL_FIRST_KIND
    if divergence(fluxes).is_zero():
        return DIVERGENCE_FREE
    if divergence(reduced).is_zero():
        return TRIVIAL_SUM
    if is_evolution_system(sys) and euler_annihilation(reduced[0], sys.m):
        return TRIVIAL_DENSITY
    return UNKNOWN


def is_evolution_system(sys: PDESystem) -> bool:
    """U^rho_{x^1} = G^rho with one equation per dependent and no x^1-jets in any G."""
    if sys.N != sys.m or sys.n < 2:
        return False
    first = tuple(1 if i == 0 else 0 for i in range(sys.n))
    if sorted(eq.leading.dep for eq in sys.equations) != list(range(sys.m)):
        return False
    if any(tuple(eq.leading.multi) != first for eq in sys.equations):
        return False
    return not any(a.multi[0] for eq in sys.equations for a in jet_atoms(eq.rhs))
