from __future__ import annotations

import json

from conftest import PROBLEMS

from conslaw.cli import main
from conslaw.errors import ParseError
from conslaw.pipeline import find_multipliers, run_fluxes
from conslaw.report import build_report, diagnostic, dumps, to_text


def kdv_report(kdv) -> dict:
    ms = find_multipliers(kdv)
    outcomes = run_fluxes(kdv, ms, ["homotopy1", "scaling"])
    return build_report(kdv.system, kdv.name, ms, outcomes, (), kdv.scalings)


def test_kdv_report_contents(kdv):
    text = dumps(kdv_report(kdv))
    assert "(1/2)*u^2" in text
    assert "\\\\tfrac{1}{2}u^{2}" in text
    rep = json.loads(text)
    assert len(rep["multipliers"]) == 4
    assert {law["method"] for law in rep["laws"]} == {"homotopy1", "scaling"}
    for law in rep["laws"]:
        assert all(law["checks"].values())
    assert "\\tfrac{1}{2}u^{2}" in to_text(rep, latex=True)


def test_reports_are_deterministic(kdv, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["fluxes", str(PROBLEMS / "kdv.json"), "--method", "all", "--json", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert dumps(kdv_report(kdv)) == dumps(kdv_report(kdv))


def test_gequation_weights(geq):
    rep = build_report(geq.system, geq.name, list(geq.multipliers), scalings=geq.scalings)
    chis = [w["chi"] for w in rep["weights"]]
    assert chis == [["0"], ["2"]]
    assert [w["critical"] for w in rep["weights"]] == [True, False]


def test_empty_report(kdv):
    rep = build_report(kdv.system, kdv.name, [])
    assert rep["multipliers"] == rep["laws"] == rep["inapplicable"] == []
    assert json.loads(dumps(rep)) == rep
    assert "multipliers: 0" in to_text(rep)


def test_diagnostic_line():
    d = json.loads(diagnostic(ParseError("unexpected '*'", 3, 7), method="direct"))
    assert d == {"code": "ParseError", "message": "unexpected '*' (line 3, column 7)",
                 "line": 3, "column": 7, "method": "direct"}


def test_multiplier_report_notes(capsys, tmp_path):
    assert main(["multipliers", str(PROBLEMS / "wave.json"), "--degree", "2", "--atom-degree", "2", "--json"]) == 0
    notes = json.loads(capsys.readouterr().out)["notes"]
    assert notes[0] == "result is truncated to the ansatz: polynomials in x, t, u of degree 2 (function-atom degree 2)"
    assert any(n.startswith("c and its derivatives") for n in notes)
    assert any("Cauchy-Kovalevskaya form in t" in n for n in notes)
    p = tmp_path / "mixed.json"
    p.write_text(json.dumps({"independents": ["t", "x"], "dependents": ["u"],
                             "equations": ["u_tx = u"], "ansatz": {"dependence": ["u"], "degree": 1}}))
    main(["multipliers", str(p), "--json"])
    notes = json.loads(capsys.readouterr().out)["notes"]
    assert any(n.startswith("system is not in Cauchy-Kovalevskaya form") for n in notes)
