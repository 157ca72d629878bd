import json

import pytest

from localterm.cli import main
from localterm.trs_io import parse_algebra, parse_trs

from conftest import FIXTURES


def fx(name):
    return str(FIXTURES / name)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", fx("owl.trs"))
    assert code == 0
    assert "rules: 1" in out and "signature: O/0, @/2" in out


def test_validate_srs(capsys):
    code, out, _ = run(capsys, "validate", fx("rfc.srs"))
    assert code == 0 and "string rewriting: yes" in out


def test_rewrite_fac_grows(capsys):
    code, out, _ = run(capsys, "rewrite", fx("fac.trs"), "-t", "fac(-(x))", "--steps", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "0: fac(-(x))"
    sizes = [len(line.split()[1]) for line in lines[:6]]
    assert sizes == sorted(sizes) and len(set(sizes)) == 6
    assert lines[-1] == "stopped after 5 steps"


def test_rewrite_reaches_normal_form(capsys):
    code, out, _ = run(capsys, "rewrite", fx("owl.trs"), "-t", "@(@(O,O),O)")
    assert code == 0
    assert out.splitlines()[-1] == "normal form after 1 steps"


def test_check_model_exit_codes(capsys, tmp_path):
    assert run(capsys, "check-model", fx("owl.trs"), fx("owl.alg"))[0] == 0
    bad = tmp_path / "bad.alg"
    bad.write_text("(CARRIER 2) (FUN O -> 0) (FUN @ 0 0 -> 1) (FUN @ 1 0 -> 0) (FUN @ 0 1 -> 1)")
    code, out, _ = run(capsys, "check-model", fx("owl.trs"), str(bad))
    assert code == 1 and "partial model: no" in out


def test_check_model_sk_relation(capsys):
    assert run(capsys, "check-model", fx("sk.trs"), fx("sk.alg"), "--relation", "ge")[0] == 0
    assert run(capsys, "check-model", fx("sk.trs"), fx("sk.alg"), "--relation", "strict")[0] == 3


def test_discover_owl(capsys, tmp_path):
    out_file = tmp_path / "owl.alg"
    code, out, _ = run(capsys, "discover", fx("owl.trs"), "-c", "2", "-d", "50", "-o", str(out_file))
    assert code == 0
    assert "states: 2" in out
    trs = parse_trs((FIXTURES / "owl.trs").read_text())
    assert parse_algebra(out_file.read_text(), trs.signature).size == 2


def test_discover_unvalidated(capsys):
    code, out, _ = run(capsys, "discover", fx("owl.trs"), "-c", "1", "-d", "50")
    assert code == 2 and "status: unvalidated" in out


def test_label_and_nf_states(capsys):
    code, out, _ = run(capsys, "label", fx("owl.trs"), fx("owl.alg"))
    assert code == 0 and len(parse_trs(out)) == 2
    code, out, _ = run(capsys, "nf-states", fx("owl.trs"), fx("owl.alg"))
    assert code == 0 and out.startswith("nf states:")


def test_prove_exit_codes(capsys, tmp_path):
    good = tmp_path / "good.trs"
    good.write_text("(VAR x) (RULES f(f(x)) -> f(x))")
    loop = tmp_path / "loop.trs"
    loop.write_text("(VAR x) (RULES f(x) -> f(x))")
    assert run(capsys, "prove", str(good))[0] == 0
    assert run(capsys, "prove", str(loop))[0] == 1
    assert run(capsys, "prove", fx("owl.trs"))[0] == 2


def test_prove_local_and_replay(capsys, tmp_path):
    trace = tmp_path / "owl.json"
    code, out, _ = run(capsys, "prove-local", fx("owl.trs"), fx("owl.alg"), "--trace", str(trace))
    assert code == 0 and "outcome: proved" in out
    assert json.loads(trace.read_text())["goal"] == "local"
    code, out, _ = run(capsys, "replay", str(trace))
    assert code == 0 and "replayed outcome: proved" in out


def test_prove_local_export(capsys, tmp_path):
    export = tmp_path / "cls.trs"
    code, _, _ = run(capsys, "prove-local", fx("s.trs"), fx("cls.alg"), "--export", str(export))
    assert code == 2
    assert len(parse_trs(export.read_text())) > 300


def test_check_script(capsys):
    code, out, _ = run(capsys, "check-script", fx("tm.trs"), fx("tm.script"))
    assert code == 0 and "outcome: proved" in out


def test_check_script_failure(capsys, tmp_path):
    bad = tmp_path / "bad.script"
    bad.write_text((FIXTURES / "tm.script").read_text().replace("(POLY L^1 1 2)", "(POLY L^1 0 2)"))
    assert run(capsys, "check-script", fx("tm.trs"), str(bad))[0] == 1


def test_rfc_with_algebra(capsys):
    code, out, _ = run(capsys, "rfc", fx("rfc.srs"), fx("rfc.alg"))
    assert code == 0 and "bcb, bacb, bcab" in out


def test_rfc_rejects_trs(capsys):
    assert run(capsys, "rfc", fx("owl.trs"))[0] == 3


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["validate"],
    ["validate", "/nonexistent/file.trs"],
    ["rewrite", fx("owl.trs")],
    ["rewrite", fx("owl.trs"), "-t", "@(O"],
    ["replay", fx("owl.trs")],
    ["discover", fx("owl.trs"), "-c", "-1"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_parse_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.trs"
    bad.write_text("(VAR x)\n(RULES f(x -> x)")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 3 and "line 2" in err


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0


def test_output_is_deterministic(capsys):
    outs = {run(capsys, "prove-local", fx("s.trs"), fx("sflat.alg"))[1] for _ in range(3)}
    assert len(outs) == 1
    outs = {run(capsys, "discover", fx("owl.trs"), "-c", "2", "-d", "30")[1] for _ in range(2)}
    assert len(outs) == 1


def test_verbose_goes_to_stderr(capsys):
    code, out, err = run(capsys, "--verbose", "validate", fx("owl.trs"))
    assert code == 0 and "localterm" in err and "localterm" not in out
