"""Global termination of a string rewriting system through forward closures.

The system has no simple interpretation proof. A three-state automaton
describes a set of strings closed under rewriting that contains every
right-hand side of a forward closure; labeling with it gives six rules that
linear interpretations remove one after another.
"""
from pathlib import Path

from localterm.rfc import build_marked, check_rfc_closure, forbidden_factors, rfc_pipeline, search_closing_algebra
from localterm.trs_io import parse_algebra, parse_srs, write_algebra

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

srs = parse_srs((FIXTURES / "rfc.srs").read_text())
m = build_marked(srs)
print("end-marker rules:", *m.sharp_rules, sep="\n  ")

a = parse_algebra((FIXTURES / "rfc.alg").read_text(), m.marked.signature)
print("\nclosure holds:", check_rfc_closure(m, a).ok)
print("forbidden factors:", ", ".join(forbidden_factors(m, a)))

trace = rfc_pipeline(srs, a)
print()
print(trace.summary())

print("\nsearching three-state algebras instead (this takes a little while)...")
found = search_closing_algebra(srs, max_states=3, min_states=3)
if found:
    print(write_algebra(found[0]))
