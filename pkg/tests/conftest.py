from pathlib import Path

import pytest

from localterm.trs_io import parse_algebra, parse_algebra_file, parse_srs, parse_trs

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def load_trs(name: str):
    text = fixture_text(name)
    return parse_srs(text) if name.endswith(".srs") else parse_trs(text)


def load_algebra(name: str, trs):
    return parse_algebra(fixture_text(name), trs.signature)


@pytest.fixture
def owl():
    return load_trs("owl.trs")


@pytest.fixture
def owl_model(owl):
    return load_algebra("owl.alg", owl)


@pytest.fixture
def s_rule():
    return load_trs("s.trs")


@pytest.fixture
def sflat_model(s_rule):
    return load_algebra("sflat.alg", s_rule)


@pytest.fixture
def sk():
    return load_trs("sk.trs")


@pytest.fixture
def sk_file(sk):
    return parse_algebra_file(fixture_text("sk.alg"), sk.signature)


@pytest.fixture
def fac():
    return load_trs("fac.trs")


@pytest.fixture
def tm():
    return load_trs("tm.trs")


@pytest.fixture
def rfc_srs():
    return load_trs("rfc.srs")


# ---------------------------------------------------------------- acceptance reporting

ACCEPTANCE_LINES: list[str] = []
PROPERTY_OUTCOMES: dict[str, str] = {}


def acceptance_line(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_collection_modifyitems(session, config, items):
    # the acceptance suite reuses the outcomes of the property suites, so it runs last
    items.sort(key=lambda item: item.path.name == "test_acceptance.py")


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_properties.py" in report.nodeid:
        PROPERTY_OUTCOMES[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
