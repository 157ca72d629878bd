"""A Turing machine that terminates only from well-formed tapes.

The script removes the rules in three quasi-compatible steps. Afterwards one
coefficient is nudged to show that the checker blames exactly that step.
"""
from pathlib import Path

from localterm.prover import check_script, parse_script
from localterm.trs_io import parse_trs

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

tm = parse_trs((FIXTURES / "tm.trs").read_text())
text = (FIXTURES / "tm.script").read_text()
trace = check_script(tm, parse_script(text, tm), text)
print(trace.summary())

broken = text.replace("(POLY L^1 1 2)", "(POLY L^1 0 2)")
trace = check_script(tm, parse_script(broken, tm), broken)
print("\nwith L^1 = 2x instead of 2x + 1:")
for k, step in enumerate(trace.steps, 1):
    print(f"  step {k}: {'ok' if step.ok else 'FAILED'}")
    for msg in step.messages[:3]:
        print(f"    {msg}")
