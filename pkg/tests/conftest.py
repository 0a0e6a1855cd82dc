import numpy as np
import pytest

from batchmspc.mspc import calibrate_bundle
from batchmspc.synth import standard_fixture

# Batch length / component count used for the synthetic end-to-end fixture.
FIXTURE_K = 5000
FIXTURE_N = 4


@pytest.fixture(scope="session")
def fixture_signals():
    return standard_fixture()


@pytest.fixture(scope="session")
def fixture_bundle(fixture_signals):
    return calibrate_bundle(fixture_signals.healthy, FIXTURE_K, FIXTURE_N)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# One line per acceptance criterion, echoed in the terminal summary so the
# verdicts survive pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
