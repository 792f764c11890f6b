"""Compare the compiled and pure-Python polynomial kernels.

Runs a micro benchmark on random sparse polynomials with both modules
imported side by side, then times an end-to-end KdV multiplier search in a
subprocess per backend (``CONSLAW_PURE_PYTHON=1`` forces the fallback).

    python benchmarks/bench_kernel.py [--repeat N]
"""
from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction
from pathlib import Path

from conslaw import _purepoly

try:
    from conslaw import _fastpoly
except ImportError:
    _fastpoly = None

ROOT = Path(__file__).resolve().parent.parent
E2E = (
    "import time; from conslaw.problemfile import load_problem; "
    "from conslaw.pipeline import find_multipliers; from conslaw.poly import BACKEND; "
    f"pb = load_problem({str(ROOT / 'problems' / 'kdv.json')!r}); "
    "t0 = time.perf_counter(); ms = find_multipliers(pb, degree=3); "
    "print(BACKEND, len(ms), time.perf_counter() - t0)"
)


def random_poly(rng: random.Random, terms: int, atoms: int = 8) -> dict:
    p = {}
    for _ in range(terms):
        ids = sorted(rng.sample(range(atoms), rng.randint(0, 4)))
        mono = tuple(x for a in ids for x in (a, rng.choice((-1, 1, 2, 3))))
        p[mono] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4))
    return p


def micro(repeat: int) -> None:
    rng = random.Random(0)
    pairs = [(random_poly(rng, 30), random_poly(rng, 30)) for _ in range(20)]
    mods = [_purepoly] + ([_fastpoly] if _fastpoly is not None else [])
    results = {}
    for mod in mods:
        def run(mod=mod):
            for p, q in pairs:
                mod.poly_add(mod.poly_mul(p, q), p)
        results[mod.BACKEND] = min(timeit.repeat(run, number=5, repeat=repeat))
        print(f"micro  {mod.BACKEND:<7} {results[mod.BACKEND] * 1e3:9.2f} ms")
    if _fastpoly is not None:
        print(f"micro  speedup {results['python'] / results['cython']:.2f}x")
    else:
        print("micro  compiled kernel not built; pure-Python only")


def end_to_end() -> None:
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("CONSLAW_PURE_PYTHON", None)
        if pure:
            env["CONSLAW_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"kdv    {out[0]:<7} {float(out[2]) * 1e3:9.2f} ms  ({out[1]} multipliers)")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    micro(args.repeat)
    end_to_end()


if __name__ == "__main__":
    main()
