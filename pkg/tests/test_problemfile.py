from __future__ import annotations

import json

import pytest
from conftest import PROBLEMS

from conslaw.errors import ParseError, ProblemError, UndeclaredSymbol
from conslaw.problemfile import (
    load_problem,
    parse_base_point,
    parse_multiplier,
    parse_weights,
    problem_from_dict,
    problem_from_text,
)

KDV_TEXT = (PROBLEMS / "kdv.conslaw").read_text()
HEADER = "independents t x\ndependents u\n"


def test_json_and_line_format_agree(kdv):
    text = problem_from_text(KDV_TEXT)
    assert text.system.R == kdv.system.R
    assert text.system.independents == kdv.system.independents
    assert text.ansatz.dependence == kdv.ansatz.dependence
    assert text.ansatz.degree == kdv.ansatz.degree == 2
    assert text.scalings == kdv.scalings
    assert text.base_point == {0: text.system.var("x")}


def test_kdv_has_one_equation_led_by_u_t(kdv):
    (eq,) = kdv.system.equations
    assert (eq.leading.dep, tuple(eq.leading.multi)) == (0, (1, 0))


def test_wave_declares_antiderivative(wave):
    fs = wave.system.functions
    assert fs["c"].kind == "arbitrary"
    assert fs["C2"].kind == "defined" and fs["C2"].derivatives is not None


def test_function_block_in_line_format():
    pb = problem_from_text(
        "independents t x y\ndependents g\n"
        "function s(1) defined homogeneity=1/2\n"
        "    derivative (1/2)*s(#1)^(-1)  # placeholders are not comments\n"
        "    power 2 -> #1\n"
        "equation g_t = s(g_x^2 + g_y^2)\n"
        "multiplier (g_x*g_yy - g_y*g_xy)/g_y^3\n"
        "scaling g=1\nscaling t=1 x=1 y=1\n")
    geq = load_problem(PROBLEMS / "gequation.json")
    assert pb.system.R == geq.system.R
    assert pb.multipliers[0].multipliers == geq.multipliers[0].multipliers
    assert pb.scalings == geq.scalings


def test_not_solved_form_is_rejected():
    with pytest.raises(ProblemError, match="not in solved form") as info:
        problem_from_text(HEADER + "equation u_t = u_tx\n")
    assert info.value.violations
    with pytest.raises(ProblemError, match="solved form"):
        problem_from_dict({"independents": ["t", "x"], "dependents": ["u"],
                           "equations": ["u_t = u_tx"]})


@pytest.mark.parametrize("body, exc, where", [
    ("foo bar\n", ParseError, "line 3"),
    ("equation u_t = u_x +* u\n", ParseError, "line 3, column 21"),
    ("equation u_t = v_x\n", UndeclaredSymbol, "line 3, column 16"),
    ("equation u_t + u = u_x\n", ProblemError, "line 3"),
    ("equation u_t u_x\n", ParseError, "line 3"),
    ("equation u_t = u_x\nmethods magic\n", ProblemError, "magic"),
])
def test_line_format_errors(body, exc, where):
    with pytest.raises(exc, match=where):
        problem_from_text(HEADER + body)


def test_schema_errors():
    with pytest.raises(ProblemError, match="unknown key"):
        problem_from_dict({"independents": ["t"], "dependents": ["u"], "equations": [], "oops": 1})
    with pytest.raises(ProblemError, match="duplicate"):
        problem_from_dict({"independents": ["t", "t"], "dependents": ["u"], "equations": ["u_t = 0"]})
    with pytest.raises(ProblemError, match="no equations"):
        problem_from_dict({"independents": ["t"], "dependents": ["u"]})


def test_invalid_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"independents": ["t",\n  ]}')
    with pytest.raises(ParseError) as info:
        load_problem(p)
    assert info.value.line == 2


def test_helpers(kdv):
    S = kdv.system
    sym = parse_weights("x=1, t=3, u=-2", S)
    assert sym == kdv.scalings[0]
    assert parse_weights({"x": 1}, S).p == (0, 1)
    with pytest.raises(ProblemError, match="'w'"):
        parse_weights("x=1 w=2", S)
    with pytest.raises(ParseError):
        parse_weights("x 1", S)
    assert parse_base_point("u = x", S) == {0: S.var("x")}
    m = parse_multiplier("u^2/2 + u_xx", S)
    assert m.origin == ("user", ())
    assert len(m) == 1


def test_example_problem_files_load():
    for path in sorted(PROBLEMS.iterdir()):
        pb = load_problem(path)
        assert pb.system.N >= 1, path.name
        if path.suffix == ".json":
            json.loads(path.read_text())
