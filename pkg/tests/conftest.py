"""Shared, expensive pipeline results (computed once per session)."""
from __future__ import annotations

import pytest

from blasiuscert.tail_roots import isolate_tail_roots
from blasiuscert.contraction import run_inner_pipeline
from blasiuscert.farfield import FarFieldParams, compute_constants
from blasiuscert.inner import build_inner
from blasiuscert.matching import run_matching


@pytest.fixture(scope="session")
def approx():
    return build_inner()


@pytest.fixture(scope="session")
def inner_result():
    return run_inner_pipeline()


@pytest.fixture(scope="session")
def roots():
    return isolate_tail_roots()


@pytest.fixture(scope="session")
def far_constants():
    return compute_constants(FarFieldParams())


@pytest.fixture(scope="session")
def matching(inner_result):
    return run_matching(inner_result.final_state)


@pytest.fixture(scope="session")
def oracle():
    from blasiuscert.oracle import solve_ivp

    return solve_ivp(x_max=20.0, tol=1e-25)


@pytest.fixture(scope="session")
def oracle_far():
    """Precise enough to resolve the e^{-3t} far-field error out to x = 6."""
    from blasiuscert.oracle import farfield_precision_tol, solve_ivp

    return solve_ivp(x_max=20.0, tol=farfield_precision_tol(6.0))


# one line per acceptance criterion, shown at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
