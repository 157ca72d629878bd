"""Command-line front end.

Exit codes: 0 proved or valid, 1 disproved or invalid, 2 unknown (also
exported or unvalidated), 3 usage or input error. Results go to stdout,
diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from . import __version__
from .algebra import (
    ModelReport,
    check_closed_monotone,
    check_partial_model,
    check_relational_model,
    nf_states,
    restrict_to_core,
)
from .discovery import DiscoveryParams, discover, discover_with_escalation
from .labeling import label_trs, nf_replacement_map
from .prover import ProofTrace, check_script, parse_script, prove_global, prove_local, replay
from .rfc import build_marked, rfc_pipeline, search_closing_algebra
from .terms import RuleError, SignatureError, Trs, eliminate_collapsing, is_srs, render, strategy_step
from .trs_io import ParseError, parse_algebra_file, parse_srs, parse_term, parse_trs, tokenize, write_algebra, write_trs

EXIT = {"proved": 0, "valid": 0, "disproved": 1, "invalid": 1, "unknown": 2, "exported": 2}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_system(path: str) -> Trs:
    text = _read(path)
    return parse_srs(text) if path.endswith(".srs") else parse_trs(text)


def _load_algebra(path: str, trs: Trs):
    return parse_algebra_file(_read(path), trs.signature)


def _write_out(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e.strerror}") from None


def _print_report(report: ModelReport) -> None:
    for c in report.counterexamples:
        print(f"  {c}")


def _finish_trace(trace: ProofTrace, args) -> int:
    print(trace.summary())
    if getattr(args, "trace", None):
        _write_out(args.trace, trace.to_json() + "\n")
    return EXIT[trace.outcome]


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    trs = _load_system(args.file)
    sig = ", ".join(f"{f}/{k}" for f, k in trs.signature.items())
    print(f"rules: {len(trs)}")
    print(f"signature: {sig}")
    print(f"left-linear: {'yes' if trs.is_left_linear() else 'no'}")
    print(f"collapsing: {'yes' if trs.is_collapsing() else 'no'}")
    print(f"string rewriting: {'yes' if is_srs(trs) else 'no'}")
    return 0


def cmd_rewrite(args) -> int:
    trs = _load_system(args.file)
    names = {t.text for t in tokenize(args.term) if t.kind == "ident"}
    variables = sorted(n for n in names if n not in trs.signature)
    t = parse_term(args.term, variables)
    print(f"0: {render(t)}")
    for k in range(1, args.steps + 1):
        hit = strategy_step(trs, t, args.strategy)
        if hit is None:
            print(f"normal form after {k - 1} steps")
            return 0
        i, p, t = hit
        where = ".".join(map(str, p)) or "root"
        print(f"{k}: {render(t)}    [rule {i} at {where}]")
    if strategy_step(trs, t, args.strategy) is None:
        print(f"normal form after {args.steps} steps")
    else:
        print(f"stopped after {args.steps} steps")
    return 0


def cmd_check_model(args) -> int:
    trs = _load_system(args.file)
    f = _load_algebra(args.algebra, trs)
    a = f.algebra
    if args.relation == "eq":
        reports = [("partial model", check_partial_model(a, trs))]
    else:
        rel = f.ge if args.relation == "ge" else f.strict
        if rel is None:
            raise UsageError(f"the algebra file declares no {args.relation.upper()} pairs")
        if args.relation == "ge":
            rel = rel.reflexive_closure()
        reports = [("closed and monotone", check_closed_monotone(a, rel)),
                   ("relational model", check_relational_model(a, rel, trs))]
    ok = True
    for name, report in reports:
        print(f"{name}: {'yes' if report.ok else 'no'}")
        _print_report(report)
        ok = ok and report.ok
    return EXIT["valid" if ok else "invalid"]


def cmd_discover(args) -> int:
    trs = _load_system(args.file)
    params = DiscoveryParams(c=args.c, d=args.d, strategy=args.strategy, max_states=args.max_states,
                             contexts=args.contexts, probe_size=args.probe_size)
    if args.escalate:
        result = discover_with_escalation(trs, params, args.escalate)
    else:
        result = discover(trs, params)
    for p, status in result.history:
        print(f"c={p.c} d={p.d} strategy={p.strategy}: {status}")
    print(f"status: {result.status}")
    for name, ok in result.validated.items():
        print(f"  {name}: {'yes' if ok else 'no'}")
    if args.verbose:
        print(f"seconds: {result.seconds:.2f}", file=sys.stderr)
    if result.algebra is not None:
        print(f"states: {result.algebra.size}")
        comments = [f"representative {k}: {render(t)}" for k, t in enumerate(result.representatives)]
        text = write_algebra(result.algebra, comments=comments)
        if args.output:
            _write_out(args.output, text)
        else:
            sys.stdout.write(text)
    return 0 if result.ok else 2


def _prepared(args):
    trs = _load_system(args.file)
    a = _load_algebra(args.algebra, trs).algebra
    if trs.is_collapsing():
        trs = eliminate_collapsing(trs)
    a, _ = restrict_to_core(a)
    return trs, a


def cmd_label(args) -> int:
    trs, a = _prepared(args)
    report = check_partial_model(a, trs)
    if not report.ok:
        print("not a partial model:", file=sys.stderr)
        for c in report.counterexamples:
            print(f"  {c}", file=sys.stderr)
        return 1
    _write_out(args.output, write_trs(label_trs(a, trs)))
    return 0


def cmd_nf_states(args) -> int:
    trs, a = _prepared(args)
    nf = sorted(nf_states(a, trs))
    print("nf states: " + (" ".join(map(str, nf)) if nf else "none"))
    for f, pos in nf_replacement_map(a, trs).items():
        print(f"mu({f}) = {{{', '.join(map(str, sorted(pos)))}}}")
    return 0


def cmd_prove(args) -> int:
    trs = _load_system(args.file)
    trace = prove_global(trs, args.coeff_bound, args.lpo, args.mirror)
    return _finish_trace(trace, args)


def cmd_prove_local(args) -> int:
    trs = _load_system(args.file)
    a = _load_algebra(args.algebra, trs).algebra
    trace = prove_local(trs, a, args.coeff_bound, not args.no_lpo, args.mirror, export_path=args.export)
    return _finish_trace(trace, args)


def cmd_check_script(args) -> int:
    trs = _load_system(args.file)
    text = _read(args.script)
    trace = check_script(trs, parse_script(text, trs), text)
    code = _finish_trace(trace, args)
    if any(not s.ok for s in trace.steps):
        return 1
    return code


def cmd_rfc(args) -> int:
    srs = _load_system(args.file)
    if not is_srs(srs):
        raise UsageError("rfc needs a string rewriting system")
    if args.algebra:
        a = parse_algebra_file(_read(args.algebra), build_marked(srs).marked.signature).algebra
        trace = rfc_pipeline(srs, a, args.coeff_bound)
    else:
        lo, hi = (args.search_states, args.search_states) if args.search_states else (1, 4)
        found = search_closing_algebra(srs, hi, args.coeff_bound, min_states=lo)
        if found is None:
            print("no closing algebra with a provable labeling found")
            return 2
        a, trace = found
        print(f"closing algebra with {a.size} states:")
        sys.stdout.write(write_algebra(a))
        if args.output:
            _write_out(args.output, write_algebra(a))
    return _finish_trace(trace, args)


def cmd_replay(args) -> int:
    try:
        trace = ProofTrace.from_json(_read(args.trace_file))
    except (ValueError, KeyError) as e:
        raise UsageError(f"not a proof trace: {e}") from None
    outcome, problems = replay(trace)
    for p in problems:
        print(p)
    print(f"replayed outcome: {outcome}")
    return EXIT[outcome]


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="localterm", description="Local termination of term rewriting systems.")
    p.add_argument("--jobs", type=int, default=int(os.environ.get("LOCALTERM_JOBS", "1")),
                   help="cap on internal parallelism (default: $LOCALTERM_JOBS or 1)")
    p.add_argument("--verbose", action="store_true", help="print version and timings to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="parse a system and summarise its signature")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("rewrite", help="print a reduction")
    s.add_argument("file")
    s.add_argument("-t", "--term", required=True)
    s.add_argument("--strategy", choices=["lo", "li"], default="lo")
    s.add_argument("--steps", type=int, default=20)
    s.set_defaults(func=cmd_rewrite)

    s = sub.add_parser("check-model", help="check an algebra against the rules")
    s.add_argument("file")
    s.add_argument("algebra")
    s.add_argument("--relation", choices=["eq", "ge", "strict"], default="eq")
    s.set_defaults(func=cmd_check_model)

    s = sub.add_parser("discover", help="find a partial model for the normalising terms")
    s.add_argument("file")
    s.add_argument("-c", type=int, default=3, help="context bound")
    s.add_argument("-d", type=int, default=100, help="step bound")
    s.add_argument("--strategy", choices=["lo", "li"], default="lo")
    s.add_argument("--max-states", type=int, default=64)
    s.add_argument("--contexts", choices=["height", "fillers"], default="height")
    s.add_argument("--probe-size", type=int, default=13)
    s.add_argument("--escalate", type=int, default=0, metavar="ROUNDS",
                   help="escalate c and d up to ROUNDS times until validation passes")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_discover)

    s = sub.add_parser("label", help="label a system with a partial model")
    s.add_argument("file")
    s.add_argument("algebra")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_label)

    s = sub.add_parser("nf-states", help="normal-form states and the induced replacement map")
    s.add_argument("file")
    s.add_argument("algebra")
    s.set_defaults(func=cmd_nf_states)

    s = sub.add_parser("prove", help="global termination proof")
    s.add_argument("file")
    s.add_argument("--coeff-bound", type=int, default=3)
    s.add_argument("--lpo", action="store_true", help="try the lexicographic path order")
    s.add_argument("--mirror", action="store_true", help="allow reversing string rewriting systems")
    s.add_argument("--trace", help="write the proof trace (JSON) to this file")
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("prove-local", help="local termination on the language of an algebra")
    s.add_argument("file")
    s.add_argument("algebra")
    s.add_argument("--coeff-bound", type=int, default=3)
    s.add_argument("--no-lpo", action="store_true")
    s.add_argument("--mirror", action="store_true")
    s.add_argument("--export", help="write the labeled system here if it is not proved internally")
    s.add_argument("--trace")
    s.set_defaults(func=cmd_prove_local)

    s = sub.add_parser("check-script", help="check a stepwise removal script")
    s.add_argument("file")
    s.add_argument("script")
    s.add_argument("--trace")
    s.set_defaults(func=cmd_check_script)

    s = sub.add_parser("rfc", help="global termination of a string rewriting system via forward closures")
    s.add_argument("file")
    s.add_argument("algebra", nargs="?")
    s.add_argument("--search-states", type=int, default=0, metavar="N",
                   help="search closing algebras with exactly N states")
    s.add_argument("--coeff-bound", type=int, default=3)
    s.add_argument("-o", "--output", help="write the found algebra here")
    s.add_argument("--trace")
    s.set_defaults(func=cmd_rfc)

    s = sub.add_parser("replay", help="re-check a proof trace")
    s.add_argument("trace_file")
    s.set_defaults(func=cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 3
    if args.verbose:
        print(f"localterm {__version__}", file=sys.stderr)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except (UsageError, ParseError, RuleError, SignatureError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    if args.verbose:
        print(f"elapsed: {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
