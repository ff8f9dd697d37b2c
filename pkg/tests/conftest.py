import numpy as np
import pytest

from sasample.alias import AliasTable
from sasample.distribution import from_pmf

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Record one PASS/FAIL line per criterion; printed in the terminal summary."""

    def record(name: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def abc_dist():
    # A=0, B=1, C=2 with pmf {A: 0.5, B: 0.25, C: 0.25}
    return from_pmf([0.0, 1.0, 2.0], [0.5, 0.25, 0.25])


@pytest.fixture
def abc_table(abc_dist):
    """Hand-built table: bins (B, alias A, 0.25), (C, alias A, 0.25), (A, alias A, 0)."""
    return AliasTable.from_bins(abc_dist, [1, 2, 0], [0, 0, 0], [0.25, 0.25, 0.0])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
