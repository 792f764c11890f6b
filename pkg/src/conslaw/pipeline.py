"""End-to-end runs: multipliers from an ansatz, then fluxes by the requested methods."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ConslawError, MethodInapplicable, NonHomogeneous, VerificationError
from .expr import DiffExpr
from .fluxes import (
    CHARACTERISTIC,
    ConservationLaw,
    ScalingSymmetry,
    flux_direct,
    flux_scaling,
    flux_symmetry_pair,
    law_homotopy1,
    law_homotopy2,
    scaling_weights,
)
from .fluxes.direct import FluxSpec
from .multipliers import MultiplierSet, solve_multipliers
from .problem import PDESystem, check_ck_form, generate_ansatz
from .problemfile import Problem
from .render import render
from .verify import (
    UNKNOWN,
    triviality_heuristic,
    verify_characteristic,
    verify_on_solutions,
)

METHOD_ORDER = ("direct", "homotopy1", "homotopy2", "scaling", "pair")


class NoScalingDeclared(MethodInapplicable):
    code = "no-scaling-symmetry"


@dataclass
class Outcome:
    """One (multiplier, method) job: a verified law or the reason there is none."""

    multiplier: int
    method: str
    law: ConservationLaw | None = None
    error: ConslawError | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    residuals: dict[str, str] = field(default_factory=dict)


def find_multipliers(problem: Problem, dependence: Sequence[DiffExpr] | None = None,
                     degree: int | None = None, atom_degree: int | None = None) -> list[MultiplierSet]:
    return search_multipliers(problem, dependence, degree, atom_degree)[0]


def search_multipliers(problem: Problem, dependence: Sequence[DiffExpr] | None = None,
                       degree: int | None = None,
                       atom_degree: int | None = None) -> tuple[list[MultiplierSet], list[str]]:
    """Solve over the ansatz; also return the notes a report should carry about it."""
    spec = problem.ansatz
    deps = dependence if dependence is not None else (spec.dependence if spec else None)
    if deps is None:
        raise ConslawError("no multiplier ansatz: give ansatz dependence in the problem or --deps")
    deg = degree if degree is not None else (spec.degree if spec else 3)
    adeg = atom_degree if atom_degree is not None else (spec.atom_degree if spec else None)
    ansatz = generate_ansatz(problem.system, list(deps), degree=deg, atom_degree=adeg)
    notes = ansatz_notes(problem.system, deps, deg, adeg, ansatz.warnings)
    return solve_multipliers(problem.system, ansatz), notes


def ansatz_notes(sys: PDESystem, deps: Sequence[DiffExpr], degree: int, atom_degree: int | None,
                 warnings: Sequence[str] = ()) -> list[str]:
    names = sys.names
    notes = ["result is truncated to the ansatz: polynomials in "
             + ", ".join(render(d, names) for d in deps) + f" of degree {degree}"
             + (f" (function-atom degree {atom_degree})" if atom_degree is not None else "")]
    notes.extend(warnings)
    for name in sorted(f for f, fn in sys.functions.items() if fn.kind == "arbitrary"):
        notes.append(f"{name} and its derivatives were split on as independent of the jet variables")
    ck = [sys.independents[j] for j in range(sys.n) if check_ck_form(sys, j)[0]]
    if ck:
        notes.append(f"system is in Cauchy-Kovalevskaya form in {ck[0]}: multipliers free of the solved "
                     f"{ck[0]}-derivatives and their derivatives correspond one-to-one to "
                     "equivalence classes of conservation laws")
    else:
        notes.append("system is not in Cauchy-Kovalevskaya form: independent multipliers "
                     "may still give equivalent conservation laws")
    return notes


def is_scaling_homogeneous(sys: PDESystem, lam: MultiplierSet,
                           scalings: Sequence[ScalingSymmetry]) -> bool:
    """Some declared scaling makes R and Lambda homogeneous with chi != 0 throughout."""
    for sym in scalings:
        try:
            rep = scaling_weights(sys, lam.multipliers, sym)
        except NonHomogeneous:
            continue
        if all(c for c in rep.chi if c is not None):
            return True
    return False


def default_method(problem: Problem, lam: MultiplierSet) -> str:
    """direct with arbitrary functions, scaling when homogeneous, else homotopy2."""
    if problem.system.has_arbitrary_functions():
        return "direct"
    if is_scaling_homogeneous(problem.system, lam, problem.scalings):
        return "scaling"
    return "homotopy2"


def run_method(problem: Problem, lam: MultiplierSet, method: str,
               base: Mapping[int, DiffExpr] | None = None,
               spec: FluxSpec | None = None) -> list[ConservationLaw]:
    """Laws for one multiplier set; scaling and pair give one law per symmetry."""
    sys = problem.system
    if method == "direct":
        return [flux_direct(sys, lam, spec or problem.flux_spec)]
    if method == "homotopy1":
        return [law_homotopy1(sys, lam)]
    if method == "homotopy2":
        return [law_homotopy2(sys, lam, problem.base_point if base is None else base)]
    if method == "scaling":
        if not problem.scalings:
            raise NoScalingDeclared("no scaling symmetry declared; give one with --weights")
        return [flux_scaling(sys, lam, sym) for sym in problem.scalings]
    if method == "pair":
        etas = list(problem.symmetries) or [sym.characteristic() for sym in problem.scalings]
        if not etas:
            raise NoScalingDeclared("the pair method needs a symmetry; declare one or give --weights")
        return [flux_symmetry_pair(sys, eta, lam.multipliers) for eta in etas]
    raise ValueError(f"unknown method {method!r}")


def check_law(sys: PDESystem, law: ConservationLaw) -> tuple[dict[str, bool], dict[str, str]]:
    checks: dict[str, bool] = {}
    residuals: dict[str, str] = {}
    reps = [verify_on_solutions(sys, law)]
    if law.status == CHARACTERISTIC:
        reps.insert(0, verify_characteristic(sys, law))
    for rep in reps:
        checks.update(rep.checks)
        residuals.update(rep.residuals)
    return checks, residuals


def run_fluxes(problem: Problem, multipliers: Sequence[MultiplierSet], methods: Sequence[str] | None,
               base: Mapping[int, DiffExpr] | None = None,
               spec: FluxSpec | None = None) -> list[Outcome]:
    """Every (multiplier, method) job in a fixed order; ``None`` picks the default method."""
    out: list[Outcome] = []
    for k, lam in enumerate(multipliers):
        chosen = list(methods) if methods else [default_method(problem, lam)]
        for method in chosen:
            try:
                laws = run_method(problem, lam, method, base, spec)
            except (MethodInapplicable, VerificationError) as exc:
                out.append(Outcome(k, method, error=exc))
                continue
            for law in laws:
                checks, residuals = check_law(problem.system, law)
                out.append(Outcome(k, method, law, checks=checks, residuals=residuals))
    return out


def _normalizer(law: ConservationLaw) -> Fraction | None:
    """Factor relating a law to the characteristic-identity law of the same multiplier."""
    if law.method != "scaling":
        return Fraction(1)
    chi = law.weights.chi if law.weights is not None else ()
    if len(set(chi)) != 1 or not chi[0]:
        return None
    return -chi[0]


def agreement(sys: PDESystem, outcomes: Sequence[Outcome]) -> list[str]:
    """Pairwise on-solutions comparison of the laws found for each multiplier."""
    lines = []
    by_mult: dict[int, list[Outcome]] = {}
    for o in outcomes:
        if o.law is not None:
            by_mult.setdefault(o.multiplier, []).append(o)
    for k in sorted(by_mult):
        laws = by_mult[k]
        for a in range(len(laws)):
            for b in range(a + 1, len(laws)):
                la, lb = laws[a].law, laws[b].law
                fa, fb = _normalizer(la), _normalizer(lb)
                tag = f"multiplier {k + 1}: {_label(la)} vs {_label(lb)}"
                if fa is None or fb is None:
                    lines.append(f"{tag}: not comparable (critical scaling)")
                    continue
                diff = [p * (1 / fa) - q * (1 / fb) for p, q in zip(la.fluxes, lb.fluxes)]
                if all(d.is_zero() for d in diff):
                    lines.append(f"{tag}: identical")
                    continue
                kind = triviality_heuristic(sys, diff)
                if kind == UNKNOWN:
                    lines.append(f"{tag}: unknown, inspect manually")
                else:
                    lines.append(f"{tag}: equivalent (difference is {kind})")
    return lines


def _label(law: ConservationLaw) -> str:
    if law.method == "scaling" and law.weights is not None:
        return f"scaling[chi={','.join(str(c) for c in law.weights.chi)}]"
    return law.method


def render_law(sys: PDESystem, law: ConservationLaw) -> list[str]:
    return [render(p, sys.names) for p in law.fluxes]
