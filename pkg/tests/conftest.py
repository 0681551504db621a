import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from fihkit import TransactionDatabase  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"

# item ids of the six-transaction toy database
A, B, C = 1, 2, 3
TOY_ROWS = [{A, B, C}, {A, B}, {A, C}, {B, C}, {A, B, C}, {C}]


@pytest.fixture
def toy():
    return TransactionDatabase.from_transactions(TOY_ROWS)


@pytest.fixture
def toy_rows():
    return [set(r) for r in TOY_ROWS]


def small_rows(max_items=8, max_rows=24, min_rows=0):
    return st.lists(
        st.sets(st.integers(min_value=1, max_value=max_items), max_size=max_items),
        min_size=min_rows,
        max_size=max_rows,
    )


# one verdict line per acceptance criterion, repeated in the terminal summary
CRITERIA: dict = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    CRITERIA[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
