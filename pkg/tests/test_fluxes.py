from __future__ import annotations

import random
from fractions import Fraction

import pytest
from conftest import expr_parser
from hypothesis import given, settings

from conslaw.calculus import divergence, partial, reduce_on_solutions
from conslaw.errors import NoFluxInAnsatz, UnsupportedBasePoint
from conslaw.expr import ZERO, JetCoord, MultiIndex, as_expr
from conslaw.fluxes import (
    CHARACTERISTIC,
    ON_SOLUTIONS,
    FluxSpec,
    ScalingSymmetry,
    bilinear_S,
    flux_direct,
    flux_homotopy1,
    flux_scaling,
    flux_symmetry_pair,
    homotopy1_integrand,
    law_homotopy1,
    law_homotopy2,
    scaling_weights,
)
from conslaw.fluxes.homotopy import base_point_fluxes
from conslaw.multipliers import MultiplierSet, characteristic_form
from conslaw.pipeline import find_multipliers
from conslaw.verify import TRIVIAL_FIRST_KIND, euler_annihilation, verify_on_solutions

import strategies as st_local

T, X = 0, 1


@pytest.fixture
def P(kdv):
    return expr_parser(kdv.system)


def ms(*exprs):
    return MultiplierSet(tuple(as_expr(e) for e in exprs))


def test_homotopy1_integrand_single_term(P):
    assert homotopy1_integrand(P("u_t"), T) == P("u")
    assert homotopy1_integrand(P("u_t"), X) == ZERO


def test_bilinear_examples(P, kdv):
    R = kdv.system.R
    assert bilinear_S([P("u")], [P("1")], R, X) == P("u^2 + u_xx")
    assert bilinear_S([ZERO], [P("1")], R, X) == ZERO


@settings(max_examples=30, deadline=None)
@given(st_local.seeds)
def test_bilinear_first_order_reduces_to_one_term(seed):
    rng = random.Random(seed)
    V = [st_local.random_expr(rng, 2, 2, max_order=1) for _ in range(2)]
    W = [st_local.random_expr(rng, 2, 2, max_order=1) for _ in range(2)]
    F = [st_local.random_expr(rng, 2, 2, max_order=1, jet_free_terms=False) for _ in range(2)]
    for i in range(2):
        expected = sum((V[r] * W[s] * partial(F[s], JetCoord(r, MultiIndex.unit(2, i)))
                        for r in range(2) for s in range(2)), start=ZERO)
        assert bilinear_S(V, W, F, i) == expected


def test_direct_requires_large_enough_ansatz(kdv, P):
    lam = ms(P("u"))
    with pytest.raises(NoFluxInAnsatz):
        flux_direct(kdv.system, lam, FluxSpec(order=0, degree=1))
    law = flux_direct(kdv.system, lam)
    assert law.status == CHARACTERISTIC
    assert (characteristic_form(kdv.system, lam.multipliers) - divergence(law.fluxes)).is_zero()


def test_base_point_fluxes(kdv, P):
    S = kdv.system
    assert base_point_fluxes(S, [P("u")], {}) == (ZERO, ZERO)
    assert base_point_fluxes(S, [P("u")], {0: P("x")}) == (P("t*x^2"), ZERO)
    # R vanishes at a constant base point
    assert base_point_fluxes(S, [P("u")], {0: P("5")}) == (ZERO, ZERO)
    with pytest.raises(UnsupportedBasePoint):
        base_point_fluxes(S, [P("u")], {0: P("u_x")})


def test_singular_base_point(geq):
    S = geq.system
    with pytest.raises(UnsupportedBasePoint):
        base_point_fluxes(S, geq.multipliers[0].multipliers, {})


def test_method_agreement_on_kdv(kdv):
    S = kdv.system
    P = expr_parser(S)
    for lam in find_multipliers(kdv):
        f = characteristic_form(S, lam.multipliers)
        laws = [flux_direct(S, lam), law_homotopy1(S, lam), law_homotopy2(S, lam),
                law_homotopy2(S, lam, {0: P("x")})]
        for law in laws:
            d = divergence(law.fluxes)
            assert (d - f).is_zero(), law.method
            assert reduce_on_solutions(d, S).is_zero()
            assert verify_on_solutions(S, law).passed
            assert euler_annihilation(d, S.m)
        assert law_homotopy2(S, lam).fluxes == law_homotopy1(S, lam).fluxes


def test_homotopy2_shifted_base_point_cubic_term(kdv):
    # the x-flux for x - tU needs -x^3/2; a -x^2/2 term in its place breaks the identity
    S = kdv.system
    P = expr_parser(S)
    lam = ms(P("x - t*u"))
    law = law_homotopy2(S, lam, {0: P("x")})
    f = characteristic_form(S, lam.multipliers)
    assert (f - divergence(law.fluxes)).is_zero()
    x3 = next(iter(P("x^3").terms))
    x2 = next(iter(P("x^2").terms))
    assert law.fluxes[1].terms[x3] == Fraction(-1, 2) and x2 not in law.fluxes[1].terms
    wrong = law.fluxes[1] + P("x^3/2") - P("x^2/2")
    assert not (f - divergence((law.fluxes[0], wrong))).is_zero()


def test_scaling_kdv_density_and_bilinearity(kdv, P):
    S = kdv.system
    sym = kdv.scalings[0]
    law = flux_scaling(S, ms(P("u")), sym)
    assert law.fluxes[0] == P("(2*u + 3*t*u_t + x*u_x)*u")
    assert law.status == ON_SOLUTIONS
    scaled = flux_scaling(S, ms(Fraction(-5, 2) * P("u")), sym)
    assert scaled.fluxes == tuple(Fraction(-5, 2) * p for p in law.fluxes)
    rep = scaling_weights(S, [P("u")], sym)
    assert (rep.r, rep.s, rep.chi) == ((-5,), (-2,), (-3,))
    assert scaling_weights(S, [P("1")], sym).s == (0,)


def test_scaling_pair_reproduces_scaling(kdv, P, geq):
    for pb in (kdv, geq):
        S = pb.system
        lam = find_multipliers(pb)[1] if pb is kdv else pb.multipliers[0]
        for sym in pb.scalings:
            a = flux_scaling(S, lam, sym)
            b = flux_symmetry_pair(S, sym.characteristic(), lam.multipliers)
            assert a.fluxes == b.fluxes


def test_characteristic_is_minus_eta(kdv, P):
    sym = ScalingSymmetry((Fraction(3), Fraction(1)), (Fraction(-2),))
    assert sym.eta() == (P("-2*u - 3*t*u_t - x*u_x"),)
    assert sym.characteristic() == (P("2*u + 3*t*u_t + x*u_x"),)


def test_pair_examples(kdv, P):
    S = kdv.system
    law = flux_symmetry_pair(S, [P("u_x")], [P("u")])
    assert law.status == ON_SOLUTIONS
    assert reduce_on_solutions(divergence(law.fluxes), S).is_zero()
    zero = flux_symmetry_pair(S, [ZERO], [P("u")])
    assert zero.fluxes == (ZERO, ZERO)
    assert zero.triviality == TRIVIAL_FIRST_KIND


def test_gequation_scaling_closed_form(geq):
    S = geq.system
    G = expr_parser(S)
    lam = geq.multipliers[0]
    L = lam[0]
    eta = G("-t*g_t - x*g_x - y*g_y")
    root = G("s(g_x^2 + g_y^2)")
    # flux_scaling uses V = -eta, so it returns the negation of this tuple
    negated = (eta * L, -eta * G("g_x") * L / root, -eta * G("g_y") * L / root)
    x1, x2 = geq.scalings
    law2 = flux_scaling(S, lam, x2)
    assert law2.weights.chi == (2,)
    for ours, other in zip(law2.fluxes, negated):
        assert (ours + other).is_zero()
    assert verify_on_solutions(S, law2).passed
    law1 = flux_scaling(S, lam, x1)
    assert law1.weights.critical == (0,)
    assert law1.diagnostics and law1.triviality != "unknown"
    g = G("g")
    assert (law1.fluxes[0] + g * L).is_zero()


def test_flux_homotopy1_on_plain_divergence(P):
    phi = (P("u*u_x"), P("u_t^2"))
    f = divergence(phi)
    out = flux_homotopy1(f, 2, 1)
    assert (divergence(out) - f).is_zero()
