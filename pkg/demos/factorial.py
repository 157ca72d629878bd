"""Factorial over the integers: fac(-(x)) never stops unfolding.

Only the symbolic side is shown here; the termination proof on the
intended inputs needs non-linear interpretations that the tool only checks
and does not search for.
"""
from pathlib import Path

from localterm.prover import prove_global
from localterm.terms import reduce
from localterm.trs_io import parse_term, parse_trs

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

fac = parse_trs((FIXTURES / "fac.trs").read_text())
t = parse_term("fac(s(s(s(0))))", signature=fac.signature)
r = reduce(fac, t, d=500)
print(f"fac(3) -> {r.final} in {r.steps} steps")

trace = prove_global(fac)
print()
print(trace.summary())
