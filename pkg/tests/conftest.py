from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from cutmodulo.syntax import parse_problem

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def load(name: str):
    return parse_problem((FIXTURES / f"{name}.prf").read_text(encoding="utf-8"))


@pytest.fixture
def fixture():
    return load


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {note}")
