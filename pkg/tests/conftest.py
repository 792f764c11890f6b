from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path

import pytest

from conslaw.expr import as_expr, monomial_key
from conslaw.linalg import rank
from conslaw.parser import Context, parse_expression
from conslaw.problemfile import load_problem

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

# criterion number -> [description, passed so far]
ACCEPTANCE: dict[int, list] = {}


def record(n: int, description: str, passed: bool) -> None:
    entry = ACCEPTANCE.setdefault(n, [description, True])
    entry[1] = entry[1] and passed


@contextmanager
def criterion(n: int, description: str):
    """Record the enclosed checks under acceptance criterion n."""
    try:
        yield
    except BaseException:
        record(n, description, False)
        raise
    record(n, description, True)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        desc, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} (tolerance: exact) {desc}")


@pytest.fixture
def problem():
    def load(name: str):
        return load_problem(PROBLEMS / name)
    return load


@pytest.fixture
def kdv(problem):
    return problem("kdv.json")


@pytest.fixture
def wave(problem):
    return problem("wave.json")


@pytest.fixture
def geq(problem):
    return problem("gequation.json")


def expr_parser(system):
    ctx = Context.of(system)
    return lambda text: parse_expression(text, ctx)


def same_span(found, expected) -> bool:
    """Equal spans of two lists of single-component multipliers, by exact rank."""
    def rows(exprs):
        monos = sorted({m for e in found + expected for m in as_expr(e).terms}, key=monomial_key)
        idx = {m: k for k, m in enumerate(monos)}
        return [{idx[m]: c for m, c in as_expr(e).terms.items()} for e in exprs], len(monos)

    a, n = rows(found)
    b, _ = rows(expected)
    return rank(a, n) == rank(b, n) == rank(a + b, n) == len(expected)
