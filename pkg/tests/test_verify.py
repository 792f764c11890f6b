from __future__ import annotations

import json

import pytest
from conftest import PROBLEMS, expr_parser

from conslaw.calculus import divergence, total_derivative
from conslaw.fluxes import ON_SOLUTIONS, ConservationLaw, flux_scaling, law_homotopy1
from conslaw.multipliers import MultiplierSet, characteristic_form
from conslaw.pipeline import METHOD_ORDER, agreement, find_multipliers, run_fluxes
from conslaw.problemfile import problem_from_dict
from conslaw.verify import (
    DIVERGENCE_FREE,
    TRIVIAL_FIRST_KIND,
    UNKNOWN,
    euler_annihilation,
    is_evolution_system,
    triviality_heuristic,
    verify_characteristic,
    verify_on_solutions,
)


@pytest.fixture
def P(kdv):
    return expr_parser(kdv.system)


def test_verify_characteristic_examples(kdv, P):
    S = kdv.system
    lam = MultiplierSet((P("u"),))
    assert verify_characteristic(S, law_homotopy1(S, lam)).passed
    broken = ConservationLaw((P("u^2/2"), P("0")), "given", lam)
    rep = verify_characteristic(S, broken)
    assert not rep.passed and "u^2*u_{x}" in rep.residuals["characteristic"]
    zero = ConservationLaw((P("0"), P("0")), "given", MultiplierSet((P("0"),)))
    assert verify_characteristic(S, zero).passed
    with pytest.raises(ValueError):
        verify_characteristic(S, ConservationLaw((P("0"), P("0")), "given"))


def test_verify_on_solutions_examples(kdv, P):
    S = kdv.system
    law = flux_scaling(S, MultiplierSet((P("u"),)), kdv.scalings[0])
    assert verify_on_solutions(S, law).passed
    rep = verify_on_solutions(S, ConservationLaw((P("u"), P("0")), "given"))
    assert not rep.passed and rep.residuals["on-solutions"]


def test_euler_annihilation_examples(P):
    assert euler_annihilation(total_derivative(P("u^2"), 0) + total_derivative(P("u_x*u"), 1))
    assert not euler_annihilation(P("u^2"))


def gequation_with_H():
    d = json.loads((PROBLEMS / "gequation.json").read_text())
    d["functions"].append({"name": "H", "arity": 2})
    return problem_from_dict(d).system


@pytest.mark.parametrize("H", ["g_x*g_y", "H(g_x, g_y)", "1"])
def test_gequation_second_multiplier_family(H):
    S = gequation_with_H()
    G = expr_parser(S)
    lam = G(f"({H})*(g_xx*g_yy - g_xy^2)")
    assert euler_annihilation(characteristic_form(S, [lam]), S.m)
    assert not euler_annihilation(characteristic_form(S, [G("g_xx")]), S.m)


def test_triviality_examples(kdv, P):
    S = kdv.system
    R = S.R[0]
    assert triviality_heuristic(S, (P("x") * R, R ** 2)) == TRIVIAL_FIRST_KIND
    assert triviality_heuristic(S, (P("u_x"), P("-u_t"))) == DIVERGENCE_FREE
    law = law_homotopy1(S, MultiplierSet((P("u"),)))
    assert triviality_heuristic(S, law) == UNKNOWN


def test_evolution_detection(kdv, wave, geq):
    assert is_evolution_system(kdv.system)
    assert is_evolution_system(geq.system)
    assert not is_evolution_system(wave.system)


def test_every_produced_law_passes_implied_checks(kdv):
    S = kdv.system
    outcomes = run_fluxes(kdv, find_multipliers(kdv), list(METHOD_ORDER))
    assert outcomes
    for o in outcomes:
        if o.law is None:
            continue
        assert all(o.checks.values()), (o.method, o.residuals)
        if o.law.status != ON_SOLUTIONS:
            assert verify_characteristic(S, o.law).passed
        assert verify_on_solutions(S, o.law).passed
        assert euler_annihilation(divergence(o.law.fluxes), S.m)


def test_agreement_lines(kdv):
    outcomes = run_fluxes(kdv, find_multipliers(kdv), ["homotopy1", "homotopy2", "scaling"])
    lines = agreement(kdv.system, outcomes)
    assert any(line.endswith("homotopy1 vs homotopy2: identical") for line in lines)
    assert any("not comparable" in line for line in lines)
    assert not any("inspect manually" in line for line in lines)
