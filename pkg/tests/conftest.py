import pytest

from hgcalc import build_builtin
from hgcalc.hgcomplex import GraphComplex

# filled by tests/test_acceptance.py: criterion number -> (passed, detail)
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def builtin():
    cache = {}

    def get(spec):
        if spec not in cache:
            cache[spec] = build_builtin(spec)
        return cache[spec]

    return get


@pytest.fixture(scope="session")
def complex_of(builtin):
    cache = {}

    def get(spec, n):
        if (spec, n) not in cache:
            cache[(spec, n)] = GraphComplex(builtin(spec), n)
        return cache[(spec, n)]

    return get


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
