"""Owl: a combinator that loops on some ground terms but not on others.

We learn a two-state partial model of the normalising Owl terms, label the
rule with it and let the LPO finish the job.
"""
from pathlib import Path

from localterm.discovery import DiscoveryParams, discover
from localterm.prover import prove_local, replay
from localterm.terms import render
from localterm.trs_io import parse_trs, write_algebra

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

owl = parse_trs((FIXTURES / "owl.trs").read_text())
print("rules:", *owl.rules, sep="\n  ")

result = discover(owl, DiscoveryParams(c=2, d=50))
print(f"\ndiscovery: {result.status}, {result.algebra.size} states")
for k, t in enumerate(result.representatives):
    print(f"  state {k} represented by {render(t)}")
print(write_algebra(result.algebra))

trace = prove_local(owl, result.algebra)
print(trace.summary())
print("\nreplayed:", replay(trace)[0])
