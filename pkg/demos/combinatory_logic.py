"""CL(S): the normalising terms built from S alone.

By default the 38-state model shipped with the tests is loaded. Pass
--discover to learn it from scratch (c=4, d=60, innermost strategy); that
takes several minutes.
"""
import sys
import time
from pathlib import Path

from localterm.algebra import check_partial_model, check_undefined_implies_redex, models_isomorphic
from localterm.discovery import DiscoveryParams, discover
from localterm.labeling import label_trs
from localterm.trs_io import parse_algebra, parse_trs

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

s = parse_trs((FIXTURES / "s.trs").read_text())
model = parse_algebra((FIXTURES / "cls.alg").read_text(), s.signature)
print(f"reference model: {model.size} states, {model.num_entries()} table entries")

if "--discover" in sys.argv:
    t0 = time.perf_counter()
    r = discover(s, DiscoveryParams(c=4, d=60, strategy="li", max_states=60))
    print(f"discovered {r.algebra.size if r.algebra else 0} states ({r.status}) in {time.perf_counter() - t0:.0f}s")
    if r.algebra is not None:
        print("isomorphic to the reference:", models_isomorphic(r.algebra, model) is not None)
        model = r.algebra

print("partial model:", check_partial_model(model, s).ok)
print("undefined terms contain redexes:", check_undefined_implies_redex(model, s).ok)
labeled = label_trs(model, s)
print(f"labeled system: {len(labeled)} rules (hand these to a global termination prover)")
