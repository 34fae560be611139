from collections import defaultdict

import pytest

from lgh.formats import parse_spec

# criterion number -> list of (passed, detail), filled by the acceptance tests
ACCEPTANCE: dict[int, list] = defaultdict(list)


@pytest.fixture(scope="session")
def make_spec():
    """Build an operator from ``key = value`` pairs in the spec-file syntax."""

    def build(**kw):
        return parse_spec("\n".join(f"{k} = {v}" for k, v in kw.items()) + "\n")

    return build


@pytest.fixture(scope="session")
def record():
    def add(criterion: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE[criterion].append((bool(passed), detail))
        return passed

    return add


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[n]
        ok = all(p for p, _ in rows)
        detail = "; ".join(d for _, d in rows)
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
