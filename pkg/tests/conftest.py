import numpy as np
import pytest

from passivesar.mission import load_scenario

# acceptance criteria append (label, passed, detail) here; printed after the run
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")


@pytest.fixture(scope="session")
def s4():
    return load_scenario("scenario_s4")


@pytest.fixture(scope="session")
def desk():
    return load_scenario("scenario_desk")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    """Record one acceptance line; returns the verdict so the test can assert on it."""
    def record(label: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_RESULTS.append((label, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return bool(ok)
    return record
