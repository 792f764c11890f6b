"""Deterministic JSON and text reports."""
from __future__ import annotations

import json
from typing import Sequence

from .errors import ConslawError, NonHomogeneous
from .fluxes import ScalingSymmetry, scaling_weights
from .multipliers import MultiplierSet
from .pipeline import Outcome
from .problem import PDESystem
from .render import render, render_latex


def _exprs(sys: PDESystem, es) -> dict:
    return {"text": [render(e, sys.names) for e in es],
            "latex": [render_latex(e, sys.names) for e in es]}


def _scaling_dict(sys: PDESystem, sym: ScalingSymmetry) -> dict:
    d = {v: str(p) for v, p in zip(sys.independents, sym.p)}
    d.update({u: str(q) for u, q in zip(sys.dependents, sym.q)})
    return d


def multiplier_entries(sys: PDESystem, multipliers: Sequence[MultiplierSet]) -> list[dict]:
    return [dict(index=k + 1, **_exprs(sys, lam.multipliers)) for k, lam in enumerate(multipliers)]


def weight_entries(sys: PDESystem, multipliers: Sequence[MultiplierSet],
                   scalings: Sequence[ScalingSymmetry]) -> list[dict]:
    out = []
    for k, lam in enumerate(multipliers):
        for sym in scalings:
            entry = {"multiplier": k + 1, "scaling": _scaling_dict(sys, sym)}
            try:
                rep = scaling_weights(sys, lam.multipliers, sym)
            except NonHomogeneous as exc:
                entry["error"] = str(exc)
            else:
                entry.update(rep.as_dict())
                entry["critical"] = bool(rep.critical)
            out.append(entry)
    return out


def law_entry(sys: PDESystem, o: Outcome) -> dict:
    law = o.law
    entry = {
        "multiplier": o.multiplier + 1,
        "method": o.method,
        "fluxes": _exprs(sys, law.fluxes),
        "status": law.status,
        "checks": dict(o.checks),
        "assumptions": list(law.assumptions),
        "diagnostics": list(law.diagnostics),
        "triviality": law.triviality,
    }
    if law.weights is not None:
        entry["weights"] = law.weights.as_dict()
    if o.residuals:
        entry["residuals"] = dict(o.residuals)
    return entry


def error_entry(o: Outcome) -> dict:
    err = o.error
    d = {"multiplier": o.multiplier + 1, "method": o.method,
         "code": getattr(err, "code", "error"), "message": str(err)}
    residual = getattr(err, "residual", None)
    if residual is not None:
        d["residual"] = residual if isinstance(residual, str) else [str(r) for r in residual]
    return d


def build_report(sys: PDESystem, name: str, multipliers: Sequence[MultiplierSet],
                 outcomes: Sequence[Outcome] = (), agreement: Sequence[str] = (),
                 scalings: Sequence[ScalingSymmetry] = (), notes: Sequence[str] = ()) -> dict:
    return {
        "notes": list(notes),
        "problem": name,
        "independents": list(sys.independents),
        "dependents": list(sys.dependents),
        "multipliers": multiplier_entries(sys, multipliers),
        "laws": [law_entry(sys, o) for o in outcomes if o.law is not None],
        "inapplicable": [error_entry(o) for o in outcomes if o.error is not None],
        "agreement": list(agreement),
        "weights": weight_entries(sys, multipliers, scalings),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def diagnostic(err: ConslawError | Exception, **extra) -> str:
    """One-line JSON diagnostic for the machine-readable error stream."""
    d = {"code": getattr(err, "code", type(err).__name__), "message": str(err)}
    for key in ("line", "column"):
        v = getattr(err, key, None)
        if v is not None:
            d[key] = v
    d.update(extra)
    return json.dumps(d, sort_keys=True)


def to_text(report: dict, latex: bool = False) -> str:
    lines = []
    indep = report["independents"]
    lines.append(f"problem: {report['problem'] or '(unnamed)'}")
    lines.append(f"multipliers: {len(report['multipliers'])}")
    for m in report["multipliers"]:
        lines.append(f"  [{m['index']}] " + "; ".join(m["text"]))
        if latex:
            lines.append("      " + "; ".join(m["latex"]))
    if report["laws"] or report["inapplicable"]:
        lines.append("conservation laws:")
    for law in report["laws"]:
        head = f"  [{law['multiplier']}] {law['method']} ({law['status']})"
        if "weights" in law:
            head += f" chi={','.join(str(c) for c in law['weights']['chi'])}"
        if law["triviality"]:
            head += f" triviality={law['triviality']}"
        lines.append(head)
        for v, f, fl in zip(indep, law["fluxes"]["text"], law["fluxes"]["latex"]):
            lines.append(f"      Phi^{v} = {f}")
            if latex:
                lines.append(f"      latex: {fl}")
        checks = ", ".join(f"{k}={'pass' if ok else 'FAIL'}" for k, ok in sorted(law["checks"].items()))
        lines.append(f"      checks: {checks}")
        for a in law["assumptions"]:
            lines.append(f"      assuming {a}")
        for d in law["diagnostics"]:
            lines.append(f"      note: {d}")
    for e in report["inapplicable"]:
        lines.append(f"  [{e['multiplier']}] {e['method']}: inapplicable ({e['code']}): {e['message']}")
    if report["weights"]:
        lines.append("scaling weights:")
        for w in report["weights"]:
            sc = " ".join(f"{k}={v}" for k, v in sorted(w["scaling"].items()))
            if "error" in w:
                lines.append(f"  [{w['multiplier']}] {sc}: {w['error']}")
            else:
                lines.append(f"  [{w['multiplier']}] {sc}: r={','.join(w['r'])} "
                             f"s={','.join(str(s) for s in w['s'])} chi={','.join(str(c) for c in w['chi'])}"
                             + (" (critical)" if w["critical"] else ""))
    for n in report.get("notes", ()):
        lines.append(f"note: {n}")
    if report["agreement"]:
        lines.append("cross-method agreement:")
        lines.extend("  " + a for a in report["agreement"])
    return "\n".join(lines) + "\n"
